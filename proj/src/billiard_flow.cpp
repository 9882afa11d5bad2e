#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "toda/dynamics.hpp"

namespace toda {

namespace {

// tanh(18.5) rounds to within a few ulps of 1.
constexpr double kHorizonArgument = 18.5;
constexpr double kRootTolerance = 1e-12;
constexpr double kTieWindow = 1e-12;
constexpr double kImmediateHitBand = 1e-10;

double wall_value(const Vector& y, const Wall& w) { return indicator_A(y, w.source); }

// First root of A_k in [lo, hi] with A_k(lo) > 0 >= A_k(hi); returns the
// bracket end still outside the wall ball.
double locate_root(const Geodesic& g, const Wall& w, double lo, double hi, double f_lo, double f_hi) {
  if (f_hi == 0.0) return hi;
  auto f = [&](double t) { return wall_value(geodesic_eval(g, t).position, w); };
  auto tol = [](double a, double b) { return std::abs(b - a) <= kRootTolerance; };
  std::uintmax_t iterations = 200;
  const auto bracket = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, iterations);
  return bracket.first;
}

}  // namespace

BilliardState make_billiard_state(const Vector& y, const Vector& direction, double omega, double t) {
  if (y.size() != direction.size()) throw std::invalid_argument("make_billiard_state: size mismatch");
  if (!(omega > 0.0)) throw std::invalid_argument("make_billiard_state: omega must be positive");
  const double norm = direction.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("make_billiard_state: zero direction");
  const double d = 1.0 - y.squaredNorm();
  if (!(d > 0.0)) throw std::domain_error("make_billiard_state: point not inside the unit ball");
  return {t, y, direction * (0.5 * omega * d / norm), omega};
}

double billiard_energy(const BilliardState& s) { return metric_norm_squared(s.y, s.w); }

BilliardState reflect(const BilliardState& s, const Wall& wall, double on_wall_tolerance,
                      double tangential_tolerance) {
  Vector n = s.y - wall.source;
  const double dist = n.norm();
  if (std::abs(dist - wall.radius) > on_wall_tolerance * std::max(1.0, wall.radius))
    throw std::domain_error("reflect: state is not on the wall sphere");
  n /= dist;
  const double wn = s.w.dot(n);
  if (std::abs(wn) < tangential_tolerance * s.w.norm())
    throw TangentialIncidence("reflect: tangential incidence on wall");
  if (wn > 0.0) throw std::domain_error("reflect: velocity does not point into the wall ball");

  BilliardState out = s;
  out.w = s.w - 2.0 * wn * n;
  out.w *= s.omega / std::sqrt(metric_norm_squared(out.y, out.w));
  return out;
}

double escape_time(const Geodesic& g) { return g.t1 + 2.0 * kHorizonArgument / g.omega; }

std::optional<Collision> next_collision(const Geodesic& g, double t_from, const Billiard& b) {
  const auto m = b.walls.size();
  if (m == 0) return std::nullopt;
  const double t_end = escape_time(g);
  if (!(t_from < t_end)) return std::nullopt;

  std::vector<Collision> candidates;
  auto decide = [&]() -> std::optional<Collision> {
    if (candidates.empty()) return std::nullopt;
    double first = std::numeric_limits<double>::infinity();
    for (const auto& c : candidates) first = std::min(first, c.t);
    std::optional<Collision> best;
    for (const auto& c : candidates)
      if (c.t <= first + kTieWindow && (!best || c.wall < best->wall)) best = Collision{first, c.wall};
    return best;
  };

  // Already touching a wall and moving into it (corners).
  const PhasePoint start = geodesic_eval(g, t_from);
  for (std::size_t k = 0; k < m; ++k) {
    const Vector rel = start.position - b.walls[k].source;
    const double a = rel.squaredNorm() - b.walls[k].radius * b.walls[k].radius;
    if (std::abs(a) <= kImmediateHitBand && rel.dot(start.velocity) < 0.0) candidates.push_back({t_from, k});
  }
  if (auto hit = decide()) return hit;

  std::vector<double> prev2(m), prev(m), cur(m);
  for (std::size_t k = 0; k < m; ++k) prev[k] = wall_value(start.position, b.walls[k]);
  double t_prev2 = t_from, t_prev = t_from;
  bool have_prev2 = false;
  double radius = start.position.norm();

  while (t_prev < t_end) {
    const double stride = (radius > 0.99 ? 0.025 : 0.05) / g.omega;
    const double t = std::min(t_prev + stride, t_end);
    const Vector y = geodesic_eval(g, t).position;
    radius = y.norm();
    for (std::size_t k = 0; k < m; ++k) cur[k] = wall_value(y, b.walls[k]);

    for (std::size_t k = 0; k < m; ++k) {
      const Wall& wall = b.walls[k];
      if (prev[k] > 0.0 && cur[k] <= 0.0) {
        candidates.push_back({locate_root(g, wall, t_prev, t, prev[k], cur[k]), k});
      } else if (have_prev2 && prev[k] > 0.0 && prev2[k] > prev[k] && cur[k] > prev[k]) {
        // A dips between samples: look for a sliver the stride stepped over.
        auto f = [&](double s) { return wall_value(geodesic_eval(g, s).position, wall); };
        const auto [t_min, a_min] = boost::math::tools::brent_find_minima(f, t_prev2, t, 52);
        if (a_min <= 0.0) candidates.push_back({locate_root(g, wall, t_prev2, t_min, prev2[k], a_min), k});
      }
    }
    if (auto hit = decide()) return hit;

    prev2.swap(prev);
    prev.swap(cur);
    t_prev2 = t_prev;
    t_prev = t;
    have_prev2 = true;
  }
  return std::nullopt;
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::MaxBounces: return "max-bounces";
    case Termination::TimeLimit: return "time-limit";
    case Termination::Escaped: return "escaped";
    case Termination::TangentialIncidence: return "tangential-incidence";
    case Termination::CornerCycling: return "corner-cycling";
    case Termination::NearIdealVertex: return "near-ideal-vertex";
  }
  return "unknown";
}

BilliardTrajectory propagate_billiard(const Billiard& b, const BilliardState& s, const PropagationConfig& config) {
  if (s.y.size() != b.dimension || s.w.size() != b.dimension)
    throw std::invalid_argument("propagate_billiard: state dimension does not match the billiard");
  if (!contains(b, s.y)) throw std::invalid_argument("propagate_billiard: start point is not inside the billiard");

  BilliardTrajectory traj;
  const double omega2 = s.omega * s.omega;
  auto record = [&](const BilliardState& st) {
    traj.max_energy_drift = std::max(traj.max_energy_drift, std::abs(billiard_energy(st) - omega2));
  };
  auto state_at = [&](const Geodesic& g, double t) {
    const PhasePoint p = geodesic_eval(g, t);
    return BilliardState{t, p.position, p.velocity, s.omega};
  };

  BilliardState state = s;
  record(state);
  std::size_t corner_run = 0;
  double last_hit = -std::numeric_limits<double>::infinity();

  while (true) {
    if (traj.bounces >= config.max_bounces) {
      traj.termination = Termination::MaxBounces;
      break;
    }
    Geodesic g = geodesic_from_state(state.y, state.w, state.t);
    g.omega = s.omega;
    const auto hit = next_collision(g, state.t, b);
    const double t_stop = hit ? hit->t : escape_time(g);

    if (t_stop > config.t_max) {
      traj.events.push_back(Segment{g, state.t, config.t_max});
      state = state_at(g, config.t_max);
      record(state);
      traj.termination = Termination::TimeLimit;
      break;
    }
    traj.events.push_back(Segment{g, state.t, t_stop});
    if (!hit) {
      traj.events.push_back(Escape{t_stop, geodesic_endpoint(g, +1)});
      state = state_at(g, t_stop);
      traj.termination = Termination::Escaped;
      break;
    }

    BilliardState incoming = state_at(g, hit->t);
    record(incoming);
    state = incoming;
    if (1.0 - incoming.y.norm() < config.ideal_vertex_distance) {
      std::ostringstream msg;
      msg << "hit on wall " << hit->wall << " within " << config.ideal_vertex_distance
          << " of the absolute at t = " << hit->t;
      traj.diagnostic = msg.str();
      traj.termination = Termination::NearIdealVertex;
      break;
    }
    corner_run = (hit->t - last_hit <= kTieWindow) ? corner_run + 1 : 0;
    if (corner_run > config.corner_cycle_limit) {
      std::ostringstream msg;
      msg << "more than " << config.corner_cycle_limit << " simultaneous reflections at t = " << hit->t;
      traj.diagnostic = msg.str();
      traj.termination = Termination::CornerCycling;
      break;
    }

    BilliardState outgoing;
    try {
      outgoing = reflect(incoming, b.walls[hit->wall]);
    } catch (const TangentialIncidence& e) {
      std::ostringstream msg;
      msg << e.what() << " " << hit->wall << " at t = " << hit->t;
      traj.diagnostic = msg.str();
      traj.termination = Termination::TangentialIncidence;
      break;
    }
    traj.events.push_back(Reflection{hit->wall, hit->t, incoming.y, incoming.w, outgoing.w});
    ++traj.bounces;
    record(outgoing);
    last_hit = hit->t;
    state = std::move(outgoing);
  }
  traj.final_state = state;
  return traj;
}

std::optional<PhasePoint> trajectory_at(const BilliardTrajectory& traj, double t) {
  for (const auto& e : traj.events) {
    if (const auto* seg = std::get_if<Segment>(&e))
      if (t >= seg->t_start && t <= seg->t_end) return geodesic_eval(seg->geodesic, t);
  }
  return std::nullopt;
}

std::vector<Epoch> epoch_sequence(const std::vector<TrajectoryEvent>& events) {
  std::vector<Epoch> out;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto* seg = std::get_if<Segment>(&events[i]);
    if (!seg) continue;
    Epoch e;
    e.duration = seg->t_end - seg->t_start;
    e.geodesic = seg->geodesic;
    if (i + 1 < events.size())
      if (const auto* r = std::get_if<Reflection>(&events[i + 1])) e.wall = r->wall;
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<std::size_t> itinerary(const std::vector<TrajectoryEvent>& events) {
  std::vector<std::size_t> out;
  for (const auto& e : events)
    if (const auto* r = std::get_if<Reflection>(&e)) out.push_back(r->wall);
  return out;
}

}  // namespace toda
