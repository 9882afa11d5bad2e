#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "toda/dynamics.hpp"
#include "toda/presets.hpp"

using namespace toda;

namespace {

TodaModel free_model(int n) {
  TodaModel m;
  m.dimension = n;
  return m;
}

Vector vec2(double a, double b) { return (Vector(2) << a, b).finished(); }

}  // namespace

TEST_CASE("constraint fill") {
  const auto m = free_model(3);
  const Vector y = vec2(0.2, -0.1);
  const Vector w = vec2(0.3, 0.4);
  const auto s = constraint_fill(m, 0.0, y, w);
  const double speed = std::sqrt(metric_norm_squared(y, w));
  CHECK(s.v0 == doctest::Approx(-speed));
  CHECK(constraint_fill(m, 0.0, y, w, false).v0 == doctest::Approx(speed));
  CHECK(std::abs(star_energy(m, s)) < 1e-15);

  const auto b = bianchi_ix();
  const auto sb = constraint_fill(b, -3.0, y, w);
  CHECK(std::abs(star_energy(b, sb)) < 1e-12);
  CHECK(sb.v0 < 0.0);

  TodaModel attract;
  attract.dimension = 3;
  attract.components = {{-10.0, (Vector(3) << 1.0, 0.0, 0.0).finished()}};
  CHECK_THROWS_AS(constraint_fill(attract, 0.0, y, Vector::Zero(2)), std::domain_error);
  CHECK_THROWS_AS(constraint_fill(b, 0.0, Vector::Zero(3), Vector::Zero(3)), std::invalid_argument);
}

TEST_CASE("accelerations solve the Euler-Lagrange equations") {
  const auto m = bianchi_ix();
  auto mass = [](const Vector& q) {
    const double d = 1.0 - q.tail(2).squaredNorm();
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(3, 3) * (4.0 / (d * d));
    out(0, 0) = -1.0;
    return out;
  };
  auto potential = [&](const Vector& q) { return potential_star(m, {q(0), q.tail(2)}).value; };
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const SmoothState s{0.0, -0.8 + 0.6 * u(rng), vec2(0.5 * u(rng), 0.5 * u(rng)), u(rng),
                        vec2(0.3 * u(rng), 0.3 * u(rng))};
    Vector q(3), qdot(3);
    q << s.y0, s.y;
    qdot << s.v0, s.w;
    const Vector expected = oracle::euler_lagrange_fd(mass, potential, q, qdot, 1e-5);
    const auto got = smooth_acceleration(m, s);
    Vector acc(3);
    acc << got.dv0, got.dw;
    CHECK((acc - expected).norm() <= 1e-5 * std::max(1.0, expected.norm()));
  }
}

TEST_CASE("zero potential run follows the closed-form geodesic") {
  const auto m = free_model(3);
  const Vector y = vec2(0.3, -0.2);
  const Vector w = vec2(-0.1, 0.35);
  const auto s0 = constraint_fill(m, 0.0, y, w);
  const auto traj = integrate_smooth(m, s0, 8.0);
  CHECK_FALSE(traj.aborted);
  CHECK(traj.contacts.empty());
  const Geodesic g = geodesic_from_state(y, w, 0.0);
  double worst = 0.0;
  for (const auto& s : traj.samples) {
    worst = std::max(worst, (s.y - geodesic_eval(g, s.t).position).norm());
    CHECK(s.y0 == doctest::Approx(s0.v0 * s.t).epsilon(1e-9).scale(1.0));
  }
  CHECK(worst < 1e-8);
  CHECK(traj.samples.back().t == doctest::Approx(8.0));
  CHECK(traj.max_drift < 1e-10);
}

TEST_CASE("Bianchi-IX smooth run bounces off the gravitational walls") {
  const auto m = bianchi_ix();
  const auto s0 = constraint_fill(m, -8.0, vec2(0.1, 0.05), vec2(0.5, 0.1) * 0.49);
  const auto traj = integrate_smooth(m, s0, 5.0);
  CHECK_FALSE(traj.aborted);
  CHECK(traj.max_drift < 1e-8);
  REQUIRE(traj.contacts.size() >= 2);
  for (const auto& c : traj.contacts) {
    CHECK(c.component < 3);
    CHECK(c.potential > 0.0);
  }
  for (std::size_t i = 1; i < traj.samples.size(); ++i) CHECK(traj.samples[i].y0 < traj.samples[i - 1].y0 + 1e-12);
}

TEST_CASE("smooth integration argument checks") {
  const auto m = bianchi_ix();
  SmoothState bad{0.0, -2.0, vec2(0.1, 0.0), 0.0, vec2(0.2, 0.0)};
  CHECK_THROWS_AS(integrate_smooth(m, bad, 1.0), std::invalid_argument);
  const auto ok = constraint_fill(m, -2.0, vec2(0.1, 0.0), vec2(0.2, 0.0));
  CHECK_THROWS_AS(integrate_smooth(m, ok, -1.0), std::invalid_argument);
  TodaModel invalid = m;
  invalid.components[0].coupling = -1.0;
  CHECK_THROWS_AS(integrate_smooth(invalid, ok, 1.0), std::invalid_argument);
}

TEST_CASE("smooth runs approach the billiard as the start deepens") {
  CompareConfig cfg;
  cfg.position = vec2(0.1, 0.05);
  cfg.direction = vec2(1.0, 0.2);
  const auto r = compare_runs(bianchi_ix(), cfg);
  REQUIRE(r.depths.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    REQUIRE(r.depths[i].contact_time);
    CHECK(std::isfinite(r.depths[i].deviation));
    CHECK(r.depths[i].max_drift < 1e-8);
    if (i > 0) CHECK(r.depths[i].deviation < r.depths[i - 1].deviation);
  }
  REQUIRE(r.depths.back().smooth_wall);
  REQUIRE(r.depths.back().billiard_wall);
  CHECK(*r.depths.back().smooth_wall == *r.depths.back().billiard_wall);
}
