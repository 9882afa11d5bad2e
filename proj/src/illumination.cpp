#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

#include "toda/billiard.hpp"

namespace toda {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double radical_inverse(std::uint64_t k, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (k > 0) {
    r += f * static_cast<double>(k % base);
    k /= base;
    f *= inv;
  }
  return r;
}

std::vector<unsigned> first_primes(std::size_t count) {
  std::vector<unsigned> primes;
  for (unsigned c = 2; primes.size() < count; ++c)
    if (std::none_of(primes.begin(), primes.end(), [c](unsigned p) { return c % p == 0; })) primes.push_back(c);
  return primes;
}

// Randomly shifted Halton points pushed through the normal quantile and
// normalised: low-discrepancy directions on S^{d-1}.
std::vector<Vector> quasi_uniform_sphere(int d, std::size_t count, std::uint64_t seed) {
  const auto primes = first_primes(static_cast<std::size_t>(d));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> shift(d);
  for (auto& s : shift) s = unit(rng);

  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t k = 1; out.size() < count; ++k) {
    Vector x(d);
    for (int j = 0; j < d; ++j) {
      double u = radical_inverse(k, primes[j]) + shift[j];
      u -= std::floor(u);
      u = std::clamp(u, 1e-12, 1.0 - 1e-12);
      x(j) = std::numbers::sqrt2 * boost::math::erf_inv(2.0 * u - 1.0);
    }
    const double norm = x.norm();
    if (norm > 1e-12) out.push_back(x / norm);
  }
  return out;
}

Vector unit_circle_point(double angle) {
  Vector p(2);
  p << std::cos(angle), std::sin(angle);
  return p;
}

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0.0 ? a + kTwoPi : a;
}

void add_unique(std::vector<Vector>& points, const Vector& p, double separation = 1e-6) {
  for (const auto& q : points)
    if ((q - p).norm() < separation) return;
  points.push_back(p);
}

Matrix source_matrix(const Billiard& b) {
  Matrix v(b.walls.size(), b.dimension);
  for (std::size_t i = 0; i < b.walls.size(); ++i) v.row(i) = b.walls[i].source.transpose();
  return v;
}

// ---------------------------------------------------------------------------
// Arc sweep on S^1.

struct Handoff {
  double lo;      // relative to the cut angle
  double hi;
  bool gap;       // coverage breaks between lo and hi
  Vector point;   // midpoint on the circle
  double margin;  // exact margin at the midpoint
};

struct ArcSweep {
  std::vector<Handoff> handoffs;
  double cut = 0.0;
};

ArcSweep sweep_arcs(const Billiard& b) {
  if (b.dimension != 2) throw std::invalid_argument("arc coverage requires a two-dimensional billiard");
  ArcSweep out;
  if (b.walls.empty()) return out;

  struct Interval {
    double begin;
    double end;
  };
  std::vector<Interval> pieces;
  const auto centre = [](const Wall& w) { return std::atan2(w.source(1), w.source(0)); };
  // Cut the circle at the centre of the first cap: strictly covered, so no
  // boundary of the union sits on the seam.
  out.cut = centre(b.walls.front());
  for (const auto& w : b.walls) {
    const double half = std::acos(1.0 / w.source.norm());
    const double s = wrap_angle(centre(w) - half - out.cut);
    const double e = s + 2.0 * half;
    if (e > kTwoPi) {
      pieces.push_back({s, kTwoPi});
      pieces.push_back({0.0, e - kTwoPi});
    } else {
      pieces.push_back({s, e});
    }
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const Interval& x, const Interval& y) { return x.begin < y.begin; });

  double reach = pieces.front().end;
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    const auto& piece = pieces[i];
    if (piece.end <= reach) continue;
    Handoff h;
    h.gap = piece.begin > reach;
    h.lo = std::min(piece.begin, reach);
    h.hi = std::max(piece.begin, reach);
    h.point = unit_circle_point(out.cut + 0.5 * (h.lo + h.hi));
    h.margin = illumination_margin(b, h.point);
    out.handoffs.push_back(std::move(h));
    reach = piece.end;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Facet enumeration of conv{v} by affinely independent d-subsets.

double binomial(std::size_t m, std::size_t k) {
  if (k > m) return 0.0;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(m - k + i) / static_cast<double>(i);
  return r;
}

// ---------------------------------------------------------------------------
// Shadow search.

struct SearchState {
  const Matrix& sources;  // m x d
  Eigen::VectorXd margins;

  explicit SearchState(const Matrix& v) : sources(v) {}

  double evaluate(const Vector& p) {
    margins = Eigen::VectorXd::Ones(sources.rows()) - sources * p;
    return margins.minCoeff();
  }
};

// -1/beta log sum exp(-beta m_alpha) and its gradient in p.
double softmin(const Matrix& sources, const Vector& p, double beta, Vector* grad) {
  const Eigen::VectorXd m = Eigen::VectorXd::Ones(sources.rows()) - sources * p;
  const double lo = m.minCoeff();
  const Eigen::VectorXd w = (-beta * (m.array() - lo)).exp().matrix();
  const double z = w.sum();
  if (grad) *grad = -(sources.transpose() * w) / z;
  return lo - std::log(z) / beta;
}

Vector ascend(const Matrix& sources, Vector p, std::size_t iterations) {
  if (iterations == 0) return p;
  constexpr double beta_first = 10.0;
  constexpr double beta_last = 1e6;
  double step = 0.1;
  Vector grad;
  for (std::size_t k = 0; k < iterations; ++k) {
    const double frac = iterations > 1 ? static_cast<double>(k) / static_cast<double>(iterations - 1) : 1.0;
    const double beta = beta_first * std::pow(beta_last / beta_first, frac);
    const double f = softmin(sources, p, beta, &grad);
    Vector tangent = grad - grad.dot(p) * p;
    const double gn = tangent.norm();
    if (gn < 1e-300) break;
    tangent /= gn;
    for (int tries = 0; tries < 30; ++tries) {
      Vector trial = (p + step * tangent).normalized();
      if (softmin(sources, trial, beta, nullptr) > f) {
        p = std::move(trial);
        step = std::min(step * 1.5, 0.5);
        break;
      }
      step *= 0.5;
      if (step < 1e-14) break;
    }
    if (step < 1e-14) step = 1e-6;
  }
  return p;
}

// Local maxima of the margin are vertices of {x : V x <= 1} projected to the
// sphere; solve for the vertex spanned by the nearly active walls.
Vector polish(const Matrix& sources, SearchState& state, const Vector& p, double* best_margin) {
  const auto d = sources.cols();
  Vector best = p;
  *best_margin = state.evaluate(p);
  const Eigen::VectorXd margins = state.margins;
  const double lo = margins.minCoeff();

  std::vector<Eigen::Index> order(margins.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return margins(a) < margins(b); });

  auto try_active = [&](const std::vector<Eigen::Index>& active) {
    if (static_cast<Eigen::Index>(active.size()) < d) return;
    Matrix a(active.size(), d);
    for (std::size_t i = 0; i < active.size(); ++i) a.row(i) = sources.row(active[i]);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
    if (cod.rank() < d) return;
    const Vector x = cod.solve(Eigen::VectorXd::Ones(active.size()));
    const double norm = x.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) return;
    const Vector candidate = x / norm;
    const double m = state.evaluate(candidate);
    if (m > *best_margin) {
      *best_margin = m;
      best = candidate;
    }
  };

  for (double delta = 1e-1; delta >= 1e-9; delta *= 0.3) {
    std::vector<Eigen::Index> active;
    for (auto idx : order) {
      if (margins(idx) > lo + delta) break;
      active.push_back(idx);
    }
    try_active(active);
  }
  try_active(std::vector<Eigen::Index>(order.begin(), order.begin() + std::min<Eigen::Index>(d, order.size())));
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------

std::optional<IlluminationResult> topological_bound(const Billiard& b) {
  const auto d = static_cast<Eigen::Index>(b.dimension);
  const auto m = static_cast<Eigen::Index>(b.walls.size());
  if (m >= d + 1) return std::nullopt;

  IlluminationResult r;
  r.verdict = Verdict::NotIlluminated;
  r.method = Method::TopologicalBound;
  Vector p = Vector::Unit(d, 0);
  if (m > 0) {
    // Fewer than n sources span at most a hyperplane: a unit normal p to their
    // affine hull sees every source at the same height c; pick the sign c <= 0.
    Matrix null_basis;
    if (m == 1) {
      null_basis = Matrix::Identity(d, d);
    } else {
      Matrix diffs(m - 1, d);
      for (Eigen::Index i = 1; i < m; ++i) diffs.row(i - 1) = (b.walls[i].source - b.walls[0].source).transpose();
      Eigen::JacobiSVD<Matrix> svd(diffs, Eigen::ComputeFullV);
      svd.setThreshold(1e-12);
      const auto rank = svd.rank();
      null_basis = svd.matrixV().rightCols(d - rank);
    }
    const Vector proj = null_basis * (null_basis.transpose() * b.walls[0].source);
    p = proj.norm() > 1e-12 ? Vector(-proj.normalized()) : Vector(null_basis.col(0).normalized());
  }
  r.margin = illumination_margin(b, p);
  r.witness = std::move(p);
  return r;
}

IlluminationResult exact_arc_coverage(const Billiard& b, double tolerance) {
  IlluminationResult r;
  r.method = Method::ExactArcCoverage;
  if (b.walls.empty()) {
    r.verdict = Verdict::NotIlluminated;
    r.witness = unit_circle_point(0.0);
    r.margin = std::numeric_limits<double>::infinity();
    return r;
  }
  const auto sweep = sweep_arcs(b);
  const Handoff* widest_gap = nullptr;
  const Handoff* closest = nullptr;
  for (const auto& h : sweep.handoffs) {
    if (h.margin > tolerance) {
      if (!widest_gap || h.margin > widest_gap->margin) widest_gap = &h;
    } else if (std::abs(h.margin) <= tolerance) {
      add_unique(r.tangency_points, h.point);
    }
    if (!closest || h.margin > closest->margin) closest = &h;
  }
  if (widest_gap) {
    r.verdict = Verdict::NotIlluminated;
    r.witness = widest_gap->point;
    r.margin = widest_gap->margin;
  } else if (!r.tangency_points.empty()) {
    r.verdict = Verdict::Illuminated;
    r.witness = r.tangency_points.front();
    r.margin = illumination_margin(b, *r.witness);
  } else {
    r.verdict = Verdict::StronglyIlluminated;
    r.margin = closest ? closest->margin : -std::numeric_limits<double>::infinity();
  }
  return r;
}

std::vector<ArcInterval> shadow_zones_2d(const Billiard& b, double tolerance) {
  if (b.dimension != 2) throw std::invalid_argument("shadow_zones_2d: billiard must be two-dimensional");
  if (b.walls.empty()) return {{0.0, kTwoPi}};
  const auto sweep = sweep_arcs(b);
  std::vector<ArcInterval> zones;
  for (const auto& h : sweep.handoffs) {
    if (!h.gap || !(h.margin > tolerance)) continue;
    const double begin = wrap_angle(sweep.cut + h.lo);
    zones.push_back({begin, begin + (h.hi - h.lo)});
  }
  std::sort(zones.begin(), zones.end(),
            [](const ArcInterval& x, const ArcInterval& y) { return x.begin < y.begin; });
  return zones;
}

std::optional<IlluminationResult> convex_hull_bound(const Billiard& b, const IlluminationConfig& config) {
  const auto d = static_cast<std::size_t>(b.dimension);
  const auto m = b.walls.size();
  if (m < d + 1 || d < 1) return std::nullopt;
  if (binomial(m, d) > static_cast<double>(config.hull_subset_budget)) return std::nullopt;

  const Matrix v = source_matrix(b);
  const double scale = v.rowwise().norm().maxCoeff();
  const double eps = 1e-12 * scale;

  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  bool any_facet = false;
  double nearest = std::numeric_limits<double>::infinity();
  Matrix diffs(std::max<std::size_t>(d, 1) - 1, d);
  while (true) {
    Vector normal;
    if (d == 1) {
      normal = Vector::Ones(1);
    } else {
      for (std::size_t i = 1; i < d; ++i) diffs.row(i - 1) = v.row(idx[i]) - v.row(idx[0]);
      Eigen::FullPivLU<Matrix> lu(diffs);
      lu.setThreshold(1e-10);
      const Matrix ker = lu.kernel();
      if (ker.cols() == 1 && lu.rank() == static_cast<Eigen::Index>(d - 1)) normal = ker.col(0).normalized();
    }
    if (normal.size() == static_cast<Eigen::Index>(d)) {
      const double offset = normal.dot(v.row(idx[0]).transpose());
      const Eigen::VectorXd side = v * normal - Eigen::VectorXd::Constant(m, offset);
      const double hi = side.maxCoeff();
      const double lo = side.minCoeff();
      if (hi <= eps || lo >= -eps) {
        any_facet = true;
        // Orient so the hull lies in normal . x <= offset; the origin's signed
        // distance to the facet is then the offset.
        const double dist = hi <= eps ? offset : -offset;
        nearest = std::min(nearest, dist);
      }
    }
    // next combination
    std::size_t k = d;
    while (k > 0 && idx[k - 1] == m - d + (k - 1)) --k;
    if (k == 0) break;
    ++idx[k - 1];
    for (std::size_t j = k; j < d; ++j) idx[j] = idx[j - 1] + 1;
  }
  if (!any_facet) return std::nullopt;
  if (!(nearest > 1.0 + config.tolerance)) return std::nullopt;

  IlluminationResult r;
  r.verdict = Verdict::StronglyIlluminated;
  r.method = Method::ConvexHullBound;
  r.margin = 1.0 - nearest;
  return r;
}

IlluminationResult randomized_search(const Billiard& b, const IlluminationConfig& config) {
  const auto d = b.dimension;
  IlluminationResult r;
  r.method = Method::RandomizedSearch;
  if (b.walls.empty()) {
    r.verdict = Verdict::NotIlluminated;
    r.witness = Vector::Unit(d, 0);
    r.margin = std::numeric_limits<double>::infinity();
    return r;
  }
  const Matrix sources = source_matrix(b);
  SearchState state(sources);

  const auto points = quasi_uniform_sphere(d, std::max<std::size_t>(config.samples, 1), config.seed);
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) scored.emplace_back(state.evaluate(points[i]), i);
  const auto starts = std::min(config.multistarts, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + starts, scored.end(),
                    [](const auto& x, const auto& y) { return x.first > y.first; });

  double best_margin = scored.front().first;
  Vector best = points[scored.front().second];
  for (std::size_t s = 0; s < starts; ++s) {
    const Vector climbed = ascend(sources, points[scored[s].second], config.iterations);
    double m = 0.0;
    const Vector polished = polish(sources, state, climbed, &m);
    if (std::abs(m) <= config.tolerance) add_unique(r.tangency_points, polished);
    if (m > best_margin) {
      best_margin = m;
      best = polished;
    }
  }

  r.margin = best_margin;
  if (best_margin > config.tolerance) {
    r.verdict = Verdict::NotIlluminated;
    r.witness = best;
  } else if (best_margin >= -config.tolerance) {
    r.verdict = Verdict::Illuminated;
    r.witness = best;
  } else {
    r.verdict = Verdict::StronglyIlluminated;
  }
  return r;
}

IlluminationResult check_illumination(const Billiard& b, const IlluminationConfig& config) {
  if (config.force_method) {
    switch (*config.force_method) {
      case Method::TopologicalBound:
        if (auto r = topological_bound(b)) return *r;
        throw std::invalid_argument("check_illumination: topological bound does not apply (m+ >= n)");
      case Method::ExactArcCoverage: return exact_arc_coverage(b, config.tolerance);
      case Method::ConvexHullBound:
        if (auto r = convex_hull_bound(b, config)) return *r;
        throw std::invalid_argument("check_illumination: convex hull test inconclusive");
      case Method::RandomizedSearch: return randomized_search(b, config);
    }
  }
  if (auto r = topological_bound(b)) return *r;
  if (b.dimension == 2) return exact_arc_coverage(b, config.tolerance);
  if (auto r = convex_hull_bound(b, config)) return *r;
  return randomized_search(b, config);
}

}  // namespace toda
