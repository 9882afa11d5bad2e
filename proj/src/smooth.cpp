#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "toda/dynamics.hpp"

namespace toda {

namespace {

// Wall contacts at depth y0 amplify rounding in Phi by exp(-y0); the state is
// carried in extended precision so the constraint stays well below 1e-8 for
// starts as deep as y0 ~ -20.
using Real = long double;
using RealVector = VectorX<Real>;
using OdeState = std::vector<Real>;

// Per-component pieces of V_* = sum A exp(Phi), Phi = Phibar - 2 y0 with
// Phibar = -exp(-y0) N / D, N = u0 (1 + |y|^2) + 2 u_vec . y, D = 1 - |y|^2.
template <typename S>
struct PotentialTerms {
  S value = 0;
  S d_y0 = 0;  // dV_*/dy0
  VectorX<S> grad;  // dV_*/dy
};

template <typename S>
PotentialTerms<S> potential_terms(const TodaModel& model, S y0, const VectorX<S>& y) {
  using std::exp;
  const S d = S(1) - y.squaredNorm();
  if (!(d > S(0))) throw std::domain_error("smooth system: point left the unit ball");
  const S decay = exp(-y0);
  PotentialTerms<S> out;
  out.grad = VectorX<S>::Zero(y.size());
  for (const auto& c : model.components) {
    const S u0 = S(c.u(0));
    const VectorX<S> uv = c.u.tail(y.size()).template cast<S>();
    const S n = u0 * (S(1) + y.squaredNorm()) + S(2) * uv.dot(y);
    const S phibar = -decay * n / d;
    const S term = S(c.coupling) * exp(phibar - S(2) * y0);
    if (term == S(0)) continue;
    out.value += term;
    out.d_y0 += term * (S(-2) - phibar);
    out.grad += term * (-decay) * (S(2) * (u0 * y + uv) / d + S(2) * n * y / (d * d));
  }
  return out;
}

template <typename S>
struct Phase {
  S y0;
  VectorX<S> y;
  S v0;
  VectorX<S> w;
};

template <typename S>
S star_energy_of(const TodaModel& model, const Phase<S>& p) {
  const S d = S(1) - p.y.squaredNorm();
  return S(-0.5) * p.v0 * p.v0 + S(2) * p.w.squaredNorm() / (d * d) + potential_terms(model, p.y0, p.y).value;
}

template <typename S>
void acceleration_of(const TodaModel& model, const Phase<S>& p, S& dv0, VectorX<S>& dw) {
  const auto terms = potential_terms(model, p.y0, p.y);
  const S d = S(1) - p.y.squaredNorm();
  dv0 = terms.d_y0;
  dw = (S(2) / d) * (p.w.squaredNorm() * p.y - S(2) * p.y.dot(p.w) * p.w) - S(0.25) * d * d * terms.grad;
}

template <typename S>
S potential_rate_of(const TodaModel& model, const Phase<S>& p) {
  const auto terms = potential_terms(model, p.y0, p.y);
  return terms.d_y0 * p.v0 + terms.grad.dot(p.w);
}

Phase<double> phase_of(const SmoothState& s) { return {s.y0, s.y, s.v0, s.w}; }

Phase<Real> unpack(const OdeState& x, int d) {
  Phase<Real> p;
  p.y0 = x[0];
  p.y = Eigen::Map<const RealVector>(x.data() + 1, d);
  p.v0 = x[d + 1];
  p.w = Eigen::Map<const RealVector>(x.data() + d + 2, d);
  return p;
}

OdeState pack(const SmoothState& s) {
  const auto d = s.y.size();
  OdeState x(2 * (d + 1));
  x[0] = s.y0;
  Eigen::Map<RealVector>(x.data() + 1, d) = s.y.cast<Real>();
  x[d + 1] = s.v0;
  Eigen::Map<RealVector>(x.data() + d + 2, d) = s.w.cast<Real>();
  return x;
}

SmoothState to_state(const Phase<Real>& p, double t) {
  return {t, static_cast<double>(p.y0), p.y.cast<double>(), static_cast<double>(p.v0), p.w.cast<double>()};
}

double kinetic_energy(const SmoothState& s) { return 0.5 * metric_norm_squared(s.y, s.w); }

WallContact make_contact(const TodaModel& model, const SmoothState& s, double potential) {
  WallContact c;
  c.t = s.t;
  c.potential = potential;
  c.state = s;
  const auto star = potential_star(model, {s.y0, s.y});
  c.component = static_cast<std::size_t>(std::max_element(star.phi.begin(), star.phi.end()) - star.phi.begin());
  return c;
}

}  // namespace

double star_energy(const TodaModel& model, const SmoothState& s) { return star_energy_of(model, phase_of(s)); }

SmoothDerivative smooth_acceleration(const TodaModel& model, const SmoothState& s) {
  SmoothDerivative out;
  acceleration_of(model, phase_of(s), out.dv0, out.dw);
  return out;
}

SmoothState constraint_fill(const TodaModel& model, double y0, const Vector& y, const Vector& w,
                            bool toward_singularity, double t) {
  if (y.size() + 1 != model.dimension || w.size() != y.size())
    throw std::invalid_argument("constraint_fill: dimension mismatch");
  SmoothState s{t, y0, y, 0.0, w};
  const double radicand = 2.0 * kinetic_energy(s) + 2.0 * potential_terms(model, y0, y).value;
  if (!(radicand >= 0.0)) throw std::domain_error("constraint_fill: negative radicand, no real y0 velocity");
  s.v0 = (toward_singularity ? -1.0 : 1.0) * std::sqrt(radicand);
  return s;
}

SmoothTrajectory integrate_smooth(const TodaModel& model, const SmoothState& s0, double t_end,
                                  const SmoothConfig& config, double contact_threshold) {
  if (!is_valid(model)) throw std::invalid_argument("integrate_smooth: model fails validation");
  if (s0.y.size() + 1 != model.dimension || s0.w.size() != s0.y.size())
    throw std::invalid_argument("integrate_smooth: state dimension does not match the model");
  if (!(t_end > s0.t)) throw std::invalid_argument("integrate_smooth: t_end must exceed the start time");
  const double kinetic0 = kinetic_energy(s0);
  const double e0 = star_energy(model, s0);
  if (std::abs(e0) > config.initial_constraint * std::max(1.0, kinetic0))
    throw std::invalid_argument("integrate_smooth: initial state violates the zero-energy constraint");

  const int d = model.dimension - 1;
  // Trial stages may overshoot into a wall (exp overflow) or out of the ball;
  // a huge finite derivative makes the error controller reject the step,
  // where NaN would slip through the error norm.
  constexpr Real kReject = 1e150L;
  auto system = [&](const OdeState& x, OdeState& dxdt, Real) {
    try {
      const Phase<Real> p = unpack(x, d);
      Real dv0;
      RealVector dw;
      acceleration_of(model, p, dv0, dw);
      dxdt[0] = p.v0;
      for (int i = 0; i < d; ++i) dxdt[1 + i] = p.w(i);
      dxdt[d + 1] = dv0;
      for (int i = 0; i < d; ++i) dxdt[d + 2 + i] = dw(i);
    } catch (const std::domain_error&) {
      std::fill(dxdt.begin(), dxdt.end(), kReject);
    }
    for (auto& v : dxdt)
      if (!std::isfinite(v)) v = std::isinf(v) ? std::copysign(kReject, v) : kReject;
  };

  namespace ode = boost::numeric::odeint;
  using Stepper = ode::runge_kutta_dopri5<OdeState, Real, OdeState, Real>;
  auto stepper = ode::make_dense_output(Real(config.abs_tolerance), Real(config.rel_tolerance), Stepper());
  stepper.initialize(pack(s0), Real(s0.t), Real(config.initial_step));

  SmoothTrajectory out;
  const double threshold = contact_threshold * kinetic0;
  auto push = [&](const Phase<Real>& p, double t) {
    const double drift = static_cast<double>(std::abs(star_energy_of(model, p)));
    out.samples.push_back(to_state(p, t));
    out.drift.push_back(drift);
    out.max_drift = std::max(out.max_drift, drift);
    return drift;
  };
  const OdeState x0 = pack(s0);
  push(unpack(x0, d), s0.t);

  Real rate_prev = potential_rate_of(model, unpack(x0, d));
  std::size_t steps = 0;
  OdeState scratch(x0.size());
  auto phase_at = [&](Real t) {
    stepper.calc_state(t, scratch);
    return unpack(scratch, d);
  };
  try {
    while (stepper.current_time() < t_end) {
      const auto [ta, tb] = stepper.do_step(system);
      if (++steps > config.max_steps_between_samples) {
        out.aborted = true;
        out.diagnostic = "step budget exhausted";
        break;
      }
      if (tb - ta < 1e-15L * std::max(Real(1), std::abs(tb))) {
        std::ostringstream msg;
        msg << "step size underflow at t = " << static_cast<double>(tb);
        out.aborted = true;
        out.diagnostic = msg.str();
        break;
      }
      const Real t_hi = std::min(tb, Real(t_end));
      const Phase<Real> hi = t_hi < tb ? phase_at(t_hi) : unpack(stepper.current_state(), d);
      const Real rate = potential_rate_of(model, hi);

      if (rate_prev > 0 && rate <= 0) {
        auto f = [&](Real t) { return potential_rate_of(model, phase_at(t)); };
        auto tol = [](Real a, Real b) { return std::abs(b - a) <= 1e-15L * std::max(Real(1), std::abs(b)); };
        std::uintmax_t iterations = 100;
        const auto bracket = boost::math::tools::toms748_solve(f, ta, t_hi, rate_prev, rate, tol, iterations);
        const Real t_peak = 0.5L * (bracket.first + bracket.second);
        const Phase<Real> peak = phase_at(t_peak);
        const double v = static_cast<double>(potential_terms(model, peak.y0, peak.y).value);
        if (v > threshold) out.contacts.push_back(make_contact(model, to_state(peak, static_cast<double>(t_peak)), v));
      }
      rate_prev = rate;

      const bool last = t_hi >= Real(t_end);
      double drift;
      if (config.record_steps || last) {
        drift = push(hi, static_cast<double>(t_hi));
      } else {
        drift = static_cast<double>(std::abs(star_energy_of(model, hi)));
        out.max_drift = std::max(out.max_drift, drift);
      }
      if (drift > config.drift_bound) {
        std::ostringstream msg;
        msg << "constraint drift " << drift << " exceeds bound " << config.drift_bound << " at t = "
            << static_cast<double>(t_hi);
        out.aborted = true;
        out.diagnostic = msg.str();
        break;
      }
      if (last) break;
    }
  } catch (const std::domain_error& e) {
    out.aborted = true;
    out.diagnostic = e.what();
  }
  return out;
}

}  // namespace toda
