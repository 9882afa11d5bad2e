#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include "toda/billiard.hpp"
#include "toda/geometry.hpp"

namespace toda {

namespace {

double sphere_area(int d) {
  // area of S^{d-1}
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

// Direction proposal: uniform on S^{d-1} mixed with narrow Gaussians in the
// gnomonic chart around each tangency point, where the cusps of B reach the
// absolute. The Gaussian width scales with the cusp cross-section (1 - r)^2.
class DirectionProposal {
 public:
  DirectionProposal(int d, const std::vector<Vector>& cusps, double weight, double width)
      : d_(d), cusps_(cusps), weight_(cusps.empty() ? 0.0 : weight), width_(width),
        uniform_density_(1.0 / sphere_area(d)) {
    for (const auto& c : cusps_) {
      Eigen::HouseholderQR<Matrix> qr{Matrix(c)};
      const Matrix q = qr.householderQ() * Matrix::Identity(d, d);
      tangents_.push_back(q.rightCols(d - 1));
    }
  }

  template <class Rng>
  Vector sample(Rng& rng, double r) const {
    std::normal_distribution<double> normal;
    if (weight_ > 0.0) {
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      if (unit(rng) < weight_) {
        std::uniform_int_distribution<std::size_t> pick(0, cusps_.size() - 1);
        const auto k = pick(rng);
        Vector t(d_ - 1);
        for (int i = 0; i < d_ - 1; ++i) t(i) = normal(rng);
        return (cusps_[k] + sigma(r) * (tangents_[k] * t)).normalized();
      }
    }
    Vector x(d_);
    for (int i = 0; i < d_; ++i) x(i) = normal(rng);
    return x.normalized();
  }

  double density(const Vector& p, double r) const {
    double g = (1.0 - weight_) * uniform_density_;
    if (weight_ == 0.0) return g;
    const double s = sigma(r);
    const int k = d_ - 1;
    const double norm = std::pow(2.0 * std::numbers::pi * s * s, -0.5 * k);
    double mix = 0.0;
    for (const auto& c : cusps_) {
      const double h = p.dot(c);
      if (h <= 0.0) continue;
      const double t2 = (p / h - c).squaredNorm();
      mix += norm * std::exp(-0.5 * t2 / (s * s)) * std::pow(1.0 + t2, 0.5 * (k + 1));
    }
    return g + weight_ * mix / static_cast<double>(cusps_.size());
  }

 private:
  double sigma(double r) const { return width_ * (1.0 - r) * (1.0 - r); }

  int d_;
  std::vector<Vector> cusps_;
  std::vector<Matrix> tangents_;
  double weight_;
  double width_;
  double uniform_density_;
};

bool inside_walls(const Billiard& b, const Vector& y) {
  for (const auto& w : b.walls)
    if (!(indicator_A(y, w.source) > 0.0)) return false;
  return true;
}

double radial_weight(int d, double r) {
  return std::pow(r, d - 1) * std::pow(2.0 / (1.0 - r * r), d);
}

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
};

}  // namespace

VolumeEstimate volume(const Billiard& b, const VolumeConfig& config) {
  if (config.samples == 0) throw std::invalid_argument("volume: sample budget must be positive");
  if (!(config.truncation > 0.0 && config.truncation < 1.0))
    throw std::invalid_argument("volume: truncation must lie in (0, 1)");

  VolumeEstimate out;
  out.seed = config.seed;
  out.workers = std::max(1u, config.workers);
  out.illumination = check_illumination(b, config.illumination);
  if (!finite_volume(out.illumination.verdict)) {
    out.finite = false;
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }

  const int d = b.dimension;
  const double eps = config.truncation;
  const double log_inv_eps = -std::log(eps);
  const DirectionProposal proposal(d, out.illumination.tangency_points, config.cusp_weight, config.cusp_width);

  // r = 1 - eps^U has density 1 / ((1 - r) ln(1/eps)) on [0, 1 - eps].
  auto run = [&](unsigned worker, std::size_t count, Moments& m) {
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32), worker};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < count; ++i) {
      const double r = 1.0 - std::pow(eps, unit(rng));
      const Vector p = proposal.sample(rng, r);
      double x = 0.0;
      if (inside_walls(b, r * p)) {
        const double g_r = 1.0 / ((1.0 - r) * log_inv_eps);
        x = radial_weight(d, r) / (g_r * proposal.density(p, r));
      }
      m.sum += x;
      m.sum_sq += x * x;
    }
  };

  const std::size_t n = config.samples;
  std::vector<Moments> parts(out.workers);
  std::vector<std::thread> threads;
  for (unsigned w = 0; w < out.workers; ++w) {
    const std::size_t count = n / out.workers + (w < n % out.workers ? 1 : 0);
    if (out.workers == 1) {
      run(w, count, parts[w]);
    } else {
      threads.emplace_back(run, w, count, std::ref(parts[w]));
    }
  }
  for (auto& t : threads) t.join();

  double sum = 0.0, sum_sq = 0.0;
  for (const auto& m : parts) {
    sum += m.sum;
    sum_sq += m.sum_sq;
  }
  const double mean = sum / static_cast<double>(n);
  const double var = n > 1 ? std::max(0.0, (sum_sq / n - mean * mean)) / static_cast<double>(n - 1) : 0.0;

  // A cusp's angular cross-section shrinks like (1 - r)^{2(d-1)} against the
  // metric blow-up (1 - r)^{-d}, so the radial density behaves like
  // (1 - r)^{d-2} and the remainder is density(1 - eps) * eps / (d - 1).
  double tail = 0.0;
  double tail_err = 0.0;
  if (!out.illumination.tangency_points.empty()) {
    const std::size_t m = std::max<std::size_t>(1000, n / 100);
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                      out.workers + 1u, 0x7a11u};
    std::mt19937_64 rng(seq);
    const double r = 1.0 - eps;
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const Vector p = proposal.sample(rng, r);
      const double x = inside_walls(b, r * p) ? 1.0 / proposal.density(p, r) : 0.0;
      s += x;
      s2 += x * x;
    }
    const double shell = s / m;
    const double shell_err = std::sqrt(std::max(0.0, s2 / m - shell * shell) / m);
    const double scale = radial_weight(d, r) * eps / std::max(1, d - 1);
    tail = shell * scale;
    tail_err = shell_err * scale;
  }

  out.finite = true;
  out.samples = n;
  out.tail = tail;
  out.value = mean + tail;
  out.standard_error = std::sqrt(var + tail * tail + tail_err * tail_err);
  return out;
}

}  // namespace toda
