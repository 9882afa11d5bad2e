#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "toda/billiard.hpp"
#include "toda/presets.hpp"

using namespace toda;

namespace {

Vector random_unit(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g;
  Vector y(d);
  for (int i = 0; i < d; ++i) y(i) = g(rng);
  return y.normalized();
}

Matrix random_rotation(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g;
  Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = g(rng);
  return Eigen::HouseholderQR<Matrix>(a).householderQ();
}

Billiard rotated(const Billiard& b, const Matrix& q) {
  std::vector<Vector> s;
  for (const auto& w : b.walls) s.push_back(q * w.source);
  return make_billiard(b.dimension, s);
}

Billiard random_billiard(std::mt19937_64& rng, int d, int m, double rmin, double rmax) {
  std::uniform_real_distribution<double> radius(rmin, rmax);
  std::vector<Vector> s;
  for (int i = 0; i < m; ++i) s.push_back(random_unit(rng, d) * radius(rng));
  return make_billiard(d, s);
}

}  // namespace

TEST_CASE("Bianchi-IX is illuminated with tangencies") {
  const auto b = walls_from_model(bianchi_ix());
  const auto r = check_illumination(b);
  CHECK(r.verdict == Verdict::Illuminated);
  CHECK(r.method == Method::ExactArcCoverage);
  CHECK(std::abs(r.margin) < 1e-9);
  REQUIRE(r.tangency_points.size() == 3);
  for (const auto& p : r.tangency_points) {
    CHECK(p.norm() == doctest::Approx(1.0));
    CHECK(std::abs(illumination_margin(b, p)) < 1e-9);
  }
}

TEST_CASE("topological bound for too few walls") {
  std::mt19937_64 rng(2);
  for (int d = 2; d <= 6; ++d) {
    for (int m = 0; m <= d; ++m) {
      const auto b = random_billiard(rng, d, m, 1.05, 5.0);
      const auto r = check_illumination(b);
      CHECK(r.verdict == Verdict::NotIlluminated);
      CHECK(r.method == Method::TopologicalBound);
      REQUIRE(r.witness);
      CHECK(r.witness->norm() == doctest::Approx(1.0));
      CHECK(illumination_margin(b, *r.witness) >= 1.0 - 1e-12);
    }
  }
  const auto scalar = walls_from_model(with_scalar_field(bianchi_ix()));
  const auto r = check_illumination(scalar);
  REQUIRE(r.witness);
  CHECK(std::abs((*r.witness)(2)) == doctest::Approx(1.0));
}

TEST_CASE("verdicts are rotation invariant") {
  std::mt19937_64 rng(4);
  const auto bianchi = walls_from_model(bianchi_ix());
  for (int i = 0; i < 5; ++i) {
    const auto r = check_illumination(rotated(bianchi, random_rotation(rng, 2)));
    CHECK(r.verdict == Verdict::Illuminated);
  }
  const auto proto = walls_from_model(prototype(5));
  const auto base = check_illumination(proto);
  for (int i = 0; i < 3; ++i) {
    const auto r = check_illumination(rotated(proto, random_rotation(rng, 4)));
    CHECK(r.verdict == base.verdict);
    CHECK(r.margin == doctest::Approx(base.margin).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("exact arc sweep on simple configurations") {
  std::vector<Vector> s;
  for (int i = 0; i < 4; ++i) {
    const double a = std::numbers::pi / 2 * i;
    s.push_back((Vector(2) << 1.5 * std::cos(a), 1.5 * std::sin(a)).finished());
  }
  CHECK(exact_arc_coverage(make_billiard(2, s)).verdict == Verdict::StronglyIlluminated);
  s.pop_back();
  const auto open = exact_arc_coverage(make_billiard(2, s));
  CHECK(open.verdict == Verdict::NotIlluminated);
  REQUIRE(open.witness);
  CHECK(illumination_margin(make_billiard(2, s), *open.witness) > 0.0);
}

TEST_CASE("convex hull bound agrees with the randomized search") {
  std::mt19937_64 rng(8);
  int decided = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto b = random_billiard(rng, 3, 10, 1.5, 4.0);
    IlluminationConfig cfg;
    const auto hull = convex_hull_bound(b, cfg);
    const auto rnd = randomized_search(b, cfg);
    if (hull) {
      ++decided;
      CHECK(hull->verdict == Verdict::StronglyIlluminated);
      CHECK(rnd.verdict == Verdict::StronglyIlluminated);
    }
    if (rnd.verdict == Verdict::NotIlluminated) {
      CHECK_FALSE(hull);
      REQUIRE(rnd.witness);
      CHECK(illumination_margin(b, *rnd.witness) > 0.0);
    }
  }
  CHECK(decided > 0);
}

TEST_CASE("randomized search matches the exact sweep in two dimensions") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const auto b = random_billiard(rng, 2, 3 + trial % 4, 1.1, 3.0);
    const auto exact = exact_arc_coverage(b);
    const auto rnd = randomized_search(b, {});
    CHECK(exact.verdict == rnd.verdict);
  }
}

TEST_CASE("forced methods") {
  const auto bianchi = walls_from_model(bianchi_ix());
  IlluminationConfig cfg;
  cfg.force_method = Method::RandomizedSearch;
  const auto r = check_illumination(bianchi, cfg);
  CHECK(r.method == Method::RandomizedSearch);
  CHECK(r.verdict == Verdict::Illuminated);
  CHECK(r.tangency_points.size() == 3);

  cfg.force_method = Method::TopologicalBound;
  CHECK_THROWS_AS(check_illumination(bianchi, cfg), std::invalid_argument);
  cfg.force_method = Method::ExactArcCoverage;
  CHECK_THROWS_AS(check_illumination(walls_from_model(prototype(4)), cfg), std::invalid_argument);
}

TEST_CASE("prototype verdicts") {
  for (int n : {4, 6, 9}) CHECK(finite_volume(check_illumination(walls_from_model(prototype(n))).verdict));
  const auto r = check_illumination(walls_from_model(prototype(10)));
  CHECK(r.verdict == Verdict::NotIlluminated);
  REQUIRE(r.witness);
  CHECK(illumination_margin(walls_from_model(prototype(10)), *r.witness) > 1e-9);
}
