#include <cmath>
#include <stdexcept>
#include <utility>

#include "toda/geometry.hpp"

namespace toda {

namespace {

struct ArcConstants {
  double a;  // v - sqrt(v^2 - 1) = 1 / (v + sqrt(v^2 - 1))
  double b;  // sqrt(v^2 - 1) * a
};

ArcConstants arc_constants(double v) {
  const double radius = std::sqrt((v - 1.0) * (v + 1.0));
  const double a = 1.0 / (v + radius);
  return {a, radius * a};
}

double sech_squared(double s) {
  const double c = std::cosh(s);
  return 1.0 / (c * c);
}

}  // namespace

Geodesic Geodesic::circle_arc(Vector n1, Vector n2, double v, double omega, double t1) {
  if (!(v > 1.0)) throw std::invalid_argument("Geodesic: circle parameter v must exceed 1");
  if (!(omega > 0.0)) throw std::invalid_argument("Geodesic: omega must be positive");
  if (n1.size() != n2.size()) throw std::invalid_argument("Geodesic: frame size mismatch");
  Geodesic g;
  g.kind = Kind::CircleArc;
  g.n1 = std::move(n1);
  g.n2 = std::move(n2);
  g.v = v;
  g.omega = omega;
  g.t1 = t1;
  return g;
}

Geodesic Geodesic::diameter(Vector n2, double omega, double t1) {
  if (!(omega > 0.0)) throw std::invalid_argument("Geodesic: omega must be positive");
  Geodesic g;
  g.kind = Kind::DiameterLine;
  g.n2 = std::move(n2);
  g.omega = omega;
  g.t1 = t1;
  return g;
}

PhasePoint geodesic_eval(const Geodesic& g, double t) {
  const double s = 0.5 * g.omega * (t - g.t1);
  const double T = std::tanh(s);
  const double Tdot = 0.5 * g.omega * sech_squared(s);
  if (g.kind == Geodesic::Kind::DiameterLine) return {g.n2 * T, g.n2 * Tdot};

  // tan(phi / 2) = a T  turns the trigonometric form into rational functions of T.
  const auto [a, b] = arc_constants(g.v);
  const double aT = a * T;
  const double den = 1.0 + aT * aT;
  PhasePoint out;
  out.position = g.n1 * (-a - 2.0 * b * aT * T / den) + g.n2 * (2.0 * b * T / den);
  out.velocity = (2.0 * b * Tdot / (den * den)) * (-2.0 * aT * g.n1 + (1.0 - aT * aT) * g.n2);
  return out;
}

Vector geodesic_endpoint(const Geodesic& g, int sign) {
  const double T = sign >= 0 ? 1.0 : -1.0;
  if (g.kind == Geodesic::Kind::DiameterLine) return g.n2 * T;
  const auto [a, b] = arc_constants(g.v);
  const double den = 1.0 + a * a;
  Vector p = g.n1 * (-a - 2.0 * b * a / den) + g.n2 * (2.0 * b * T / den);
  return p / p.norm();
}

Geodesic geodesic_from_state(const Vector& y, const Vector& ydot, double t) {
  if (y.size() != ydot.size()) throw std::invalid_argument("geodesic_from_state: size mismatch");
  const double speed = ydot.norm();
  if (!(speed > 0.0)) throw std::invalid_argument("geodesic_from_state: zero velocity");
  const double d = 1.0 - y.squaredNorm();
  if (!(d > 0.0)) throw std::domain_error("geodesic_from_state: point not inside the unit ball");

  const Vector u = ydot / speed;
  const double omega = 2.0 * speed / d;
  const double along = y.dot(u);
  const Vector perp = y - along * u;
  const double lever = perp.norm();

  if (lever < kRadialThreshold) {
    const double T = along;
    return Geodesic::diameter(u, omega, t - 2.0 * std::atanh(T) / omega);
  }

  // Circle through y tangent to u and orthogonal to the unit sphere: centre
  // c = y + s nu with |c|^2 = s^2 + 1.
  const Vector nu = perp / lever;
  const double s = d / (2.0 * lever);
  const Vector centre = y + s * nu;
  const double v = std::sqrt(s * s + 1.0);
  const Vector n1 = -centre / centre.norm();
  Vector n2 = (-along * nu + (lever + s) * u) / v;
  n2 -= n2.dot(n1) * n1;
  n2.normalize();

  const auto [a, b] = arc_constants(v);
  const double eta = y.dot(n2);  // = 2 b T / (1 + a^2 T^2)
  const double T = eta / (b + std::sqrt(std::max(0.0, b * b - eta * eta * a * a)));
  return Geodesic::circle_arc(n1, n2, v, omega, t - 2.0 * std::atanh(T) / omega);
}

}  // namespace toda
