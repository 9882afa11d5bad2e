#include <cmath>
#include <limits>
#include <stdexcept>

#include "toda/geometry.hpp"

namespace toda {

namespace {

struct SaturatingSum {
  double finite = 0.0;
  bool pos_inf = false;
  bool neg_inf = false;

  void add(double term) {
    if (std::isinf(term)) {
      (term > 0 ? pos_inf : neg_inf) = true;
    } else {
      finite += term;
    }
  }

  double value() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (pos_inf) return inf;
    if (neg_inf) return -inf;
    return finite;
  }
};

}  // namespace

double saturated_term(double coupling, double exponent) {
  if (std::isnan(exponent)) throw std::domain_error("potential: NaN exponent");
  return coupling * std::exp(exponent);
}

double potential_z(const TodaModel& model, const Vector& z) {
  if (z.size() != model.dimension) throw std::invalid_argument("potential_z: dimension mismatch");
  SaturatingSum sum;
  for (const auto& c : model.components) sum.add(saturated_term(c.coupling, c.u.dot(z)));
  return sum.value();
}

double phi_exponent(const Vector& u, const BallPointd& p) {
  const double u0 = u(0);
  if (u0 == 0.0) throw std::domain_error("phi_exponent: u_0 = 0 has no ball-chart form");
  const Vector source = -u.tail(u.size() - 1) / u0;
  const double d = 1.0 - p.y.squaredNorm();
  if (!(d > 0.0)) throw std::domain_error("phi_exponent: point not inside the unit ball");
  return -u0 * std::exp(-p.y0) * indicator_A(p.y, source) / d - 2.0 * p.y0;
}

StarPotential potential_star(const TodaModel& model, const BallPointd& p) {
  if (p.y.size() + 1 != model.dimension)
    throw std::invalid_argument("potential_star: dimension mismatch");
  StarPotential out;
  out.phi.reserve(model.components.size());
  SaturatingSum sum;
  for (const auto& c : model.components) {
    const double phi = phi_exponent(c.u, p);
    out.phi.push_back(phi);
    sum.add(saturated_term(c.coupling, phi));
  }
  out.value = sum.value();
  return out;
}

}  // namespace toda
