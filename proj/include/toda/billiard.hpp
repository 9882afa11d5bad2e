#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "toda/model.hpp"
#include "toda/types.hpp"

namespace toda {

/// Wall sphere |y - source| = radius, orthogonal to the absolute
/// (|source|^2 - radius^2 = 1). The billiard lies outside it.
struct Wall {
  Vector source;
  double radius = 0.0;
  std::size_t origin_component = 0;
};

/// Intersection of the wall exteriors inside the unit ball D^{dimension}.
/// No walls means the whole ball.
struct Billiard {
  int dimension = 0;  // n - 1
  std::vector<Wall> walls;

  std::size_t wall_count() const { return walls.size(); }
};

/// Wall built from a source point with |source| > 1.
Wall make_wall(Vector source, std::size_t origin_component = 0);

/// Billiard from raw source points; origin_component is the list position.
Billiard make_billiard(int dimension, const std::vector<Vector>& sources);

/// One wall per component with u^2 > 0, source -u_vec / u_0. Throws
/// std::invalid_argument for models failing validation.
Billiard walls_from_model(const TodaModel& model, double lightlike_tolerance = kLightlikeTolerance);

/// Strictly outside every wall ball. Throws for |y| >= 1.
bool contains(const Billiard& b, const Vector& y);

/// Closed cap {p in S : p . axis >= cos_half_angle} lit by one source.
struct Cap {
  Vector axis;
  double cos_half_angle = 1.0;  // 1 / |source|
};

Cap illuminated_cap(const Wall& w);

/// p . source > 1.
bool strongly_illuminates(const Wall& w, const Vector& p);
/// p . source >= 1.
bool illuminates(const Wall& w, const Vector& p);

/// min over walls of (1 - p . source); positive exactly on the shadow. +inf
/// when there are no walls.
double illumination_margin(const Billiard& b, const Vector& p);

enum class Verdict { StronglyIlluminated, Illuminated, NotIlluminated };
enum class Method { ExactArcCoverage, ConvexHullBound, TopologicalBound, RandomizedSearch };

std::string to_string(Verdict v);
std::string to_string(Method m);

/// "oscillatory" for finite volume, "Kasner-like" otherwise.
std::string regime_label(Verdict v);

inline bool finite_volume(Verdict v) { return v != Verdict::NotIlluminated; }

struct IlluminationConfig {
  double tolerance = 1e-9;  // margin band treated as tangency
  std::uint64_t seed = 42;
  std::size_t samples = 4096;     // quasi-uniform sphere points
  std::size_t multistarts = 64;   // ascents started from the best samples
  std::size_t iterations = 200;   // ascent steps per start
  std::size_t hull_subset_budget = 200000;  // facet enumeration limit, C(m, d)
  /// Run only this stage (used to cross-check stages against each other).
  std::optional<Method> force_method;
};

struct IlluminationResult {
  Verdict verdict = Verdict::NotIlluminated;
  Method method = Method::TopologicalBound;
  /// Shadow point (NotIlluminated) or tangency point (Illuminated).
  std::optional<Vector> witness;
  /// Best margin found (shadow search) or margin at the witness.
  double margin = 0.0;
  /// Distinct tangency points discovered, unit vectors.
  std::vector<Vector> tangency_points;
};

IlluminationResult check_illumination(const Billiard& b, const IlluminationConfig& config = {});

/// Pipeline stages, exposed for cross-checks. Each returns nullopt when the
/// stage cannot decide.
std::optional<IlluminationResult> topological_bound(const Billiard& b);
IlluminationResult exact_arc_coverage(const Billiard& b, double tolerance = 1e-9);
std::optional<IlluminationResult> convex_hull_bound(const Billiard& b, const IlluminationConfig& config);
IlluminationResult randomized_search(const Billiard& b, const IlluminationConfig& config);

/// Open arc of the unit circle, counter-clockwise from begin to end (radians,
/// begin in [0, 2 pi), end > begin).
struct ArcInterval {
  double begin = 0.0;
  double end = 0.0;

  double length() const { return end - begin; }
};

/// Non-illuminated open arcs for a two-dimensional billiard (n = 3). Gaps whose
/// midpoint margin does not exceed `tolerance` are tangencies, not zones.
std::vector<ArcInterval> shadow_zones_2d(const Billiard& b, double tolerance = 1e-9);

struct VolumeConfig {
  std::size_t samples = 1'000'000;
  std::uint64_t seed = 42;
  unsigned workers = 1;
  double truncation = 1e-6;       // radial cut-off 1 - epsilon
  double cusp_weight = 0.5;       // share of directions drawn near tangency points
  double cusp_width = 1.0;        // angular spread = cusp_width * (1 - r)^2
  IlluminationConfig illumination;
};

struct VolumeEstimate {
  bool finite = false;
  double value = 0.0;
  double standard_error = 0.0;
  double tail = 0.0;  // analytic contribution beyond the cut-off
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  IlluminationResult illumination;
};

/// Hyperbolic volume of the billiard. Infinite (no sampling) when the sphere
/// is not illuminated; otherwise a Monte Carlo estimate reproducible for a
/// fixed (seed, workers) pair.
VolumeEstimate volume(const Billiard& b, const VolumeConfig& config = {});

}  // namespace toda
