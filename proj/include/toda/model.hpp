#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "toda/types.hpp"

namespace toda {

/// One term A * exp(u_a z^a) of the potential. u(0) is the time-like entry.
struct ExponentialComponent {
  double coupling = 1.0;
  Vector u;
};

/// Pseudo-Euclidean Toda-like model: minisuperspace dimension n with metric
/// diag(-1, +1, ..., +1) and a sum of exponential components.
struct TodaModel {
  int dimension = 0;
  std::vector<ExponentialComponent> components;
};

/// Relative band |u^2| <= tol * max(1, |u|^2) inside which a vector is lightlike.
inline constexpr double kLightlikeTolerance = 1e-12;

/// -u_0^2 + |u_vec|^2.
template <typename Derived>
typename Derived::Scalar minkowski_square(const Eigen::MatrixBase<Derived>& u) {
  if (u.size() < 2) throw std::invalid_argument("minkowski_square: vector needs at least 2 entries");
  const auto spatial = u.tail(u.size() - 1);
  return spatial.squaredNorm() - u(0) * u(0);
}

enum class Restriction {
  Dimension,             // n >= 3
  VectorLength,          // every u has n entries
  NonzeroCoupling,       // A != 0
  PositiveWallCoupling,  // A > 0 whenever u^2 > 0
  PositiveTimeComponent  // u_0 > 0 for every component
};

struct Violation {
  std::optional<std::size_t> component;
  Restriction restriction;
  std::string message;
};

using ValidationReport = std::vector<Violation>;

/// Every violated restriction, in component order. Empty means valid.
ValidationReport validate_model(const TodaModel& model);

inline bool is_valid(const TodaModel& model) { return validate_model(model).empty(); }

std::string to_string(Restriction r);

enum class ComponentClass { Wall, Lightlike, Timelike };

struct Classification {
  std::vector<ComponentClass> classes;
  std::vector<std::size_t> walls;  // indices with u^2 > 0

  std::size_t wall_count() const { return walls.size(); }
};

ComponentClass classify_vector(const Vector& u, double tolerance = kLightlikeTolerance);
Classification classify_components(const TodaModel& model, double tolerance = kLightlikeTolerance);

std::string to_string(ComponentClass c);

/// Linear map z = M x from the x-coordinates of diagonal cosmologies (metric
/// G_ij = delta_ij - 1) to z-coordinates where the metric is diag(-1, 1, ...).
Matrix x_to_z_matrix(int n);

Vector x_to_z(const Vector& x);

/// Dual map on exponent vectors: returns u with u . z(x) == w . x for all x.
Vector exponent_transform(const Vector& w);

}  // namespace toda
