#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "toda/billiard.hpp"
#include "toda/geometry.hpp"
#include "toda/model.hpp"
#include "toda/types.hpp"

namespace toda {

// ---------------------------------------------------------------------------
// Billiard flow.

struct BilliardState {
  double t = 0.0;
  Vector y;
  Vector w;  // dy/dt
  double omega = 1.0;
};

/// State at y moving along `direction` with hyperbolic speed omega.
BilliardState make_billiard_state(const Vector& y, const Vector& direction, double omega, double t = 0.0);

/// h_ij w^i w^j at the state's position.
double billiard_energy(const BilliardState& s);

/// Raised by reflect() when the velocity is (nearly) tangent to the wall.
class TangentialIncidence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Specular reflection off the wall sphere. Throws std::domain_error when y is
/// farther than `on_wall_tolerance` from the sphere or the velocity leaves the
/// wall ball, TangentialIncidence when the normal component is below
/// `tangential_tolerance` relative to |w|.
BilliardState reflect(const BilliardState& s, const Wall& w, double on_wall_tolerance = 1e-9,
                      double tangential_tolerance = 1e-12);

struct Collision {
  double t = 0.0;
  std::size_t wall = 0;
};

/// Earliest inward wall crossing after t_from, or nullopt if the geodesic
/// reaches the absolute first.
std::optional<Collision> next_collision(const Geodesic& g, double t_from, const Billiard& b);

/// Time at which the closed-form geodesic is numerically on the absolute.
double escape_time(const Geodesic& g);

struct Segment {
  Geodesic geodesic;
  double t_start = 0.0;
  double t_end = 0.0;
};

struct Reflection {
  std::size_t wall = 0;
  double t = 0.0;
  Vector position;
  Vector w_in;
  Vector w_out;
};

struct Escape {
  double t = 0.0;
  Vector direction;  // endpoint on the absolute
};

using TrajectoryEvent = std::variant<Segment, Reflection, Escape>;

enum class Termination { MaxBounces, TimeLimit, Escaped, TangentialIncidence, CornerCycling, NearIdealVertex };

std::string to_string(Termination t);

struct BilliardTrajectory {
  std::vector<TrajectoryEvent> events;
  Termination termination = Termination::MaxBounces;
  std::string diagnostic;
  BilliardState final_state;
  std::size_t bounces = 0;
  double max_energy_drift = 0.0;  // max |h(w, w) - omega^2| over event boundaries
};

struct PropagationConfig {
  std::size_t max_bounces = 10000;
  double t_max = std::numeric_limits<double>::infinity();
  std::size_t corner_cycle_limit = 8;
  double ideal_vertex_distance = 1e-9;  // stop when 1 - |y| drops below this at a hit
};

/// Alternating segments and reflections from a state strictly inside B.
BilliardTrajectory propagate_billiard(const Billiard& b, const BilliardState& s, const PropagationConfig& config = {});

/// Position and velocity of the billiard trajectory at time t (within its span).
std::optional<PhasePoint> trajectory_at(const BilliardTrajectory& traj, double t);

struct Epoch {
  std::optional<std::size_t> wall;  // wall ending the epoch
  double duration = 0.0;
  Geodesic geodesic;
};

std::vector<Epoch> epoch_sequence(const std::vector<TrajectoryEvent>& events);

/// Wall indices in hit order.
std::vector<std::size_t> itinerary(const std::vector<TrajectoryEvent>& events);

// ---------------------------------------------------------------------------
// Smooth system in (y0, y) with lapse exp(-2 y0).

struct SmoothState {
  double t = 0.0;
  double y0 = 0.0;
  Vector y;
  double v0 = 0.0;  // dy0/dt
  Vector w;         // dy/dt
};

/// E_* = -v0^2 / 2 + h(w, w) / 2 + V_*.
double star_energy(const TodaModel& model, const SmoothState& s);

struct SmoothDerivative {
  double dv0 = 0.0;
  Vector dw;
};

/// Accelerations from the Euler-Lagrange equations of L_*.
SmoothDerivative smooth_acceleration(const TodaModel& model, const SmoothState& s);

/// Solves the zero-energy constraint for v0. Negative root (y0 decreasing,
/// toward the singularity) unless toward_singularity is false. Throws
/// std::domain_error for a negative radicand.
SmoothState constraint_fill(const TodaModel& model, double y0, const Vector& y, const Vector& w,
                            bool toward_singularity = true, double t = 0.0);

struct SmoothConfig {
  double abs_tolerance = 1e-12;
  double rel_tolerance = 1e-12;
  double drift_bound = 1e-8;        // abort when |E_*| exceeds this
  double initial_constraint = 1e-10;
  double initial_step = 1e-4;
  std::size_t max_steps_between_samples = 1'000'000;
  bool record_steps = true;          // keep every accepted step
};

/// Local maximum of V_* along the smooth trajectory, i.e. a soft wall contact.
struct WallContact {
  double t = 0.0;
  double potential = 0.0;
  std::size_t component = 0;          // argmax of Phi
  std::optional<std::size_t> wall;    // wall index of that component, if it is a wall
  SmoothState state;
};

struct SmoothTrajectory {
  std::vector<SmoothState> samples;
  std::vector<double> drift;   // |E_*| at each sample
  std::vector<WallContact> contacts;
  double max_drift = 0.0;
  bool aborted = false;
  std::string diagnostic;
};

/// Integrates from s0 to t_end (forward, t_end > s0.t) with an adaptive
/// Dormand-Prince scheme. Throws std::invalid_argument for a bad model or an
/// initial state violating the constraint. Contacts are V_* maxima above
/// contact_threshold times the initial kinetic energy.
SmoothTrajectory integrate_smooth(const TodaModel& model, const SmoothState& s0, double t_end,
                                  const SmoothConfig& config = {}, double contact_threshold = 1e-3);

// ---------------------------------------------------------------------------
// Smooth vs billiard comparison.

struct CompareConfig {
  std::vector<double> depths{-4.0, -8.0, -12.0};
  Vector position;
  Vector direction;
  double omega = 1.0;
  double t_max = 5.0;
  SmoothConfig smooth;
};

struct DepthComparison {
  double depth = 0.0;
  std::optional<double> contact_time;
  std::optional<std::size_t> smooth_wall;
  std::optional<std::size_t> billiard_wall;
  double deviation = std::numeric_limits<double>::quiet_NaN();
  /// |y_smooth - y_billiard| at every soft contact, in order.
  std::vector<double> contact_deviations;
  std::vector<std::size_t> smooth_itinerary;
  std::vector<std::size_t> billiard_itinerary;
  double max_drift = 0.0;
};

struct CompareResult {
  std::vector<DepthComparison> depths;
  BilliardTrajectory billiard;
  std::vector<SmoothTrajectory> smooth;  // one per depth
};

/// Runs the billiard and the smooth system from the same (y, direction) at
/// each depth and measures |y_smooth(t*) - y_billiard(t*)| at the first soft
/// contact t*.
CompareResult compare_runs(const TodaModel& model, const CompareConfig& config);

}  // namespace toda
