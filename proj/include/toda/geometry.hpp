#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "toda/model.hpp"
#include "toda/types.hpp"

namespace toda {

/// Point of R x D^{n-1} in Misner-Chitre coordinates (y^0, y_vec).
template <typename Scalar>
struct BallPoint {
  Scalar y0{};
  VectorX<Scalar> y;
};

using BallPointd = BallPoint<double>;

/// Lower light cone V_-: z^0 < -|z_vec|.
template <typename Derived>
bool in_lower_cone(const Eigen::MatrixBase<Derived>& z) {
  if (z.size() < 2) return false;
  return z(0) < -z.tail(z.size() - 1).norm();
}

template <typename Derived>
BallPoint<typename Derived::Scalar> z_to_y(const Eigen::MatrixBase<Derived>& z) {
  using std::log;
  using std::sqrt;
  using Scalar = typename Derived::Scalar;
  if (!in_lower_cone(z)) throw std::domain_error("z_to_y: point outside the lower light cone");
  const auto zs = z.tail(z.size() - 1);
  const Scalar a = -z(0);
  const Scalar b = zs.norm();
  // -z^2 = (a - b)(a + b) = exp(-2 y0)
  BallPoint<Scalar> p;
  p.y0 = Scalar(-0.5) * (log(a - b) + log(a + b));
  // z_vec / z^0 = 2 y / (1 + |y|^2)
  const VectorX<Scalar> zeta = zs / z(0);
  const Scalar z2 = zeta.squaredNorm();
  p.y = zeta / (Scalar(1) + sqrt((Scalar(1) - sqrt(z2)) * (Scalar(1) + sqrt(z2))));
  return p;
}

template <typename Scalar>
VectorX<Scalar> y_to_z(const BallPoint<Scalar>& p) {
  using std::exp;
  const Scalar r2 = p.y.squaredNorm();
  if (!(r2 < Scalar(1))) throw std::domain_error("y_to_z: |y| must be < 1");
  const Scalar scale = exp(-p.y0) / (Scalar(1) - r2);
  VectorX<Scalar> z(p.y.size() + 1);
  z(0) = -scale * (Scalar(1) + r2);
  z.tail(p.y.size()) = Scalar(-2) * scale * p.y;
  return z;
}

/// Conformal factor 4 / (1 - |y|^2)^2 of the ball metric.
template <typename Derived>
typename Derived::Scalar metric_factor(const Eigen::MatrixBase<Derived>& y) {
  using Scalar = typename Derived::Scalar;
  const Scalar d = Scalar(1) - y.squaredNorm();
  if (!(d > Scalar(0))) throw std::domain_error("metric_factor: point not inside the unit ball");
  return Scalar(4) / (d * d);
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> metric_at(
    const Eigen::MatrixBase<Derived>& y) {
  using Scalar = typename Derived::Scalar;
  const auto n = y.size();
  return metric_factor(y) *
         Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Identity(n, n);
}

/// h_ij w^i w^j at y.
template <typename DerivedY, typename DerivedW>
typename DerivedY::Scalar metric_norm_squared(const Eigen::MatrixBase<DerivedY>& y,
                                              const Eigen::MatrixBase<DerivedW>& w) {
  return metric_factor(y) * w.squaredNorm();
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar hyperbolic_distance(const Eigen::MatrixBase<DerivedA>& a,
                                              const Eigen::MatrixBase<DerivedB>& b) {
  using std::asinh;
  using std::sqrt;
  using Scalar = typename DerivedA::Scalar;
  const Scalar da = Scalar(1) - a.squaredNorm();
  const Scalar db = Scalar(1) - b.squaredNorm();
  if (!(da > Scalar(0)) || !(db > Scalar(0)))
    throw std::domain_error("hyperbolic_distance: points must lie inside the unit ball");
  return Scalar(2) * asinh(sqrt((a - b).squaredNorm() / (da * db)));
}

/// A(y, v) = (y - v)^2 - v^2 + 1. Negative inside the wall ball centred at v.
template <typename DerivedY, typename DerivedV>
typename DerivedY::Scalar indicator_A(const Eigen::MatrixBase<DerivedY>& y,
                                      const Eigen::MatrixBase<DerivedV>& v) {
  return (y - v).squaredNorm() - v.squaredNorm() + typename DerivedY::Scalar(1);
}

// ---------------------------------------------------------------------------
// Geodesics of the ball model.

/// Closed-form geodesic with hyperbolic speed omega.
///
/// CircleArc: arc of the circle centred at -v n1 with radius sqrt(v^2 - 1) in the
/// plane spanned by n1, n2; the point closest to the origin is reached at t = t1.
/// DiameterLine: y(t) = n2 tanh(omega (t - t1) / 2).
struct Geodesic {
  enum class Kind { CircleArc, DiameterLine };

  Kind kind = Kind::DiameterLine;
  Vector n1;  // unused for DiameterLine
  Vector n2;
  double v = 0.0;
  double omega = 1.0;
  double t1 = 0.0;

  static Geodesic circle_arc(Vector n1, Vector n2, double v, double omega, double t1);
  static Geodesic diameter(Vector n2, double omega, double t1);
};

struct PhasePoint {
  Vector position;
  Vector velocity;
};

PhasePoint geodesic_eval(const Geodesic& g, double t);

/// Ideal endpoint on the absolute as t -> +inf (sign > 0) or t -> -inf (sign < 0).
Vector geodesic_endpoint(const Geodesic& g, int sign = +1);

/// Geodesic through y with coordinate velocity ydot at time t.
Geodesic geodesic_from_state(const Vector& y, const Vector& ydot, double t);

/// Radial fall-back threshold on |y - (y.u) u| for unit direction u.
inline constexpr double kRadialThreshold = 1e-12;

// ---------------------------------------------------------------------------
// Potentials.

/// V(z) = sum A exp(u . z). Overflowing terms saturate: +inf wins over -inf.
double potential_z(const TodaModel& model, const Vector& z);

/// A exp(x) with saturation to +-inf instead of overflow noise.
double saturated_term(double coupling, double exponent);

struct StarPotential {
  double value = 0.0;
  std::vector<double> phi;  // Phi(y, u^alpha) per component
};

/// Phi(y, u) = -u0 exp(-y0) A(y, -u_vec/u0) / (1 - |y|^2) - 2 y0. Requires u0 != 0.
double phi_exponent(const Vector& u, const BallPointd& p);

/// V_* = exp(-2 y0) V = sum A exp(Phi(y, u^alpha)).
StarPotential potential_star(const TodaModel& model, const BallPointd& p);

}  // namespace toda
