#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "toda/dynamics.hpp"
#include "toda/presets.hpp"

using namespace toda;

namespace {

Vector polar(double r, double angle) { return (Vector(2) << r * std::cos(angle), r * std::sin(angle)).finished(); }

Billiard regular(int k, double r) {
  std::vector<Vector> s;
  for (int i = 0; i < k; ++i) s.push_back(polar(r, 2.0 * std::numbers::pi * i / k));
  return make_billiard(2, s);
}

std::vector<Reflection> reflections(const BilliardTrajectory& traj) {
  std::vector<Reflection> out;
  for (const auto& e : traj.events)
    if (const auto* r = std::get_if<Reflection>(&e)) out.push_back(*r);
  return out;
}

}  // namespace

TEST_CASE("specular reflection") {
  const Wall wall = make_wall(polar(2.0, 0.0));
  const double theta = 3.0;
  const Vector normal = polar(1.0, theta);
  const Vector y = wall.source + wall.radius * normal;
  REQUIRE(y.norm() < 1.0);
  const Vector dir = (Vector(2) << 1.0, 0.3).finished();
  REQUIRE(dir.dot(normal) < 0.0);
  const auto s = make_billiard_state(y, dir, 1.3);
  const auto out = reflect(s, wall);
  CHECK(out.w.dot(normal) == doctest::Approx(-s.w.dot(normal)));
  const Vector tangent = (Vector(2) << -normal(1), normal(0)).finished();
  CHECK(out.w.dot(tangent) == doctest::Approx(s.w.dot(tangent)));
  CHECK(billiard_energy(out) == doctest::Approx(1.3 * 1.3).epsilon(1e-14));

  CHECK_THROWS_AS(reflect(make_billiard_state(y, tangent, 1.0), wall), TangentialIncidence);
  CHECK_THROWS_AS(reflect(make_billiard_state(Vector::Zero(2), dir, 1.0), wall), std::domain_error);
  CHECK_THROWS_AS(reflect(make_billiard_state(y, -dir, 1.0), wall), std::domain_error);
}

TEST_CASE("first collision on a diameter matches the ray-circle oracle") {
  const auto b = walls_from_model(bianchi_ix());
  for (int k = 0; k < 24; ++k) {
    const Vector e = polar(1.0, 0.05 + 2.0 * std::numbers::pi * k / 24);
    const double omega = 0.7 + 0.1 * k;
    const auto s = make_billiard_state(Vector::Zero(2), e, omega);
    Geodesic g = geodesic_from_state(s.y, s.w, 0.0);
    REQUIRE(g.kind == Geodesic::Kind::DiameterLine);
    double best = std::numeric_limits<double>::infinity();
    std::size_t wall = 0;
    for (std::size_t i = 0; i < b.walls.size(); ++i) {
      const double r = oracle::ray_circle(Vector::Zero(2), e, b.walls[i].source, b.walls[i].radius);
      if (std::isfinite(r) && r < best) {
        best = r;
        wall = i;
      }
    }
    REQUIRE(best < 1.0);
    const auto hit = next_collision(g, 0.0, b);
    REQUIRE(hit);
    CHECK(hit->wall == wall);
    CHECK(hit->t == doctest::Approx(2.0 * std::atanh(best) / omega).epsilon(1e-10));
  }
}

TEST_CASE("escape through a shadow zone") {
  const auto b = regular(3, 1.5);
  const auto s = make_billiard_state(Vector::Zero(2), polar(1.0, std::numbers::pi / 3), 1.0);
  const auto traj = propagate_billiard(b, s);
  CHECK(traj.termination == Termination::Escaped);
  CHECK(traj.bounces == 0);
  REQUIRE(std::holds_alternative<Escape>(traj.events.back()));
  CHECK((std::get<Escape>(traj.events.back()).direction - polar(1.0, std::numbers::pi / 3)).norm() < 1e-9);

  // Bouncing off a wall first, then leaving.
  const auto bounced = propagate_billiard(b, make_billiard_state(polar(0.2, 2.0), polar(1.0, 0.2), 1.0));
  CHECK(bounced.termination == Termination::Escaped);
  CHECK(bounced.bounces >= 1);

  Billiard empty;
  empty.dimension = 3;
  const auto free = propagate_billiard(empty, make_billiard_state(Vector::Zero(3), Vector::Unit(3, 2), 2.0));
  CHECK(free.termination == Termination::Escaped);
  CHECK(free.bounces == 0);
  CHECK(escape_time(geodesic_from_state(Vector::Zero(3), Vector::Unit(3, 2), 0.0)) > 0.0);
}

TEST_CASE("Bianchi-IX billiard keeps bouncing") {
  const auto b = walls_from_model(bianchi_ix());
  PropagationConfig cfg;
  cfg.max_bounces = 500;
  const auto traj = propagate_billiard(b, make_billiard_state(polar(0.1, 0.4), polar(1.0, 1.1), 1.0), cfg);
  CHECK(traj.termination == Termination::MaxBounces);
  CHECK(traj.bounces == 500);
  CHECK(traj.max_energy_drift < 1e-10);
  const auto hits = reflections(traj);
  REQUIRE(hits.size() == 500);
  for (std::size_t i = 0; i < hits.size(); ++i) {
    const auto& h = hits[i];
    CHECK(h.position.norm() < 1.0);
    CHECK(std::abs(indicator_A(h.position, b.walls[h.wall].source)) < 1e-8);
    if (i > 0) {
      CHECK(h.wall != hits[i - 1].wall);
      CHECK(h.t > hits[i - 1].t);
    }
  }
  const auto it = itinerary(traj.events);
  CHECK(it.size() == 500);
  CHECK(it.front() == hits.front().wall);
}

TEST_CASE("reversing the final velocity retraces the path") {
  const auto b = walls_from_model(bianchi_ix());
  PropagationConfig cfg;
  cfg.max_bounces = 15;
  const auto start = make_billiard_state(polar(0.3, -0.7), polar(1.0, 2.2), 1.0);
  const auto fwd = propagate_billiard(b, start, cfg);
  // Step back onto a plain segment point before reversing.
  const auto hits = reflections(fwd);
  const double t_mid = 0.5 * (hits[13].t + hits[14].t);
  const auto p = trajectory_at(fwd, t_mid);
  REQUIRE(p);
  BilliardState rev{0.0, p->position, -p->velocity, 1.0};
  cfg.max_bounces = 14;
  const auto back = propagate_billiard(b, rev, cfg);
  const auto back_hits = reflections(back);
  REQUIRE(back_hits.size() == 14);
  for (std::size_t i = 0; i < 14; ++i) CHECK(back_hits[i].wall == hits[13 - i].wall);
  // Position at the final reflection matches the forward first reflection.
  CHECK((back_hits.back().position - hits.front().position).norm() < 1e-8);
}

TEST_CASE("time limit and trajectory queries") {
  const auto b = walls_from_model(bianchi_ix());
  PropagationConfig cfg;
  cfg.t_max = 7.5;
  const auto traj = propagate_billiard(b, make_billiard_state(Vector::Zero(2), polar(1.0, 0.3), 1.0), cfg);
  CHECK(traj.termination == Termination::TimeLimit);
  CHECK(traj.final_state.t == doctest::Approx(7.5));
  for (const auto& h : reflections(traj)) {
    const auto p = trajectory_at(traj, h.t);
    REQUIRE(p);
    CHECK((p->position - h.position).norm() < 1e-9);
  }
  CHECK_FALSE(trajectory_at(traj, 8.0));
  CHECK_FALSE(trajectory_at(traj, -1.0));
}

TEST_CASE("epochs partition the trajectory") {
  const auto b = walls_from_model(bianchi_ix());
  PropagationConfig cfg;
  cfg.max_bounces = 40;
  const auto traj = propagate_billiard(b, make_billiard_state(polar(0.05, 1.0), polar(1.0, -0.4), 1.0), cfg);
  const auto epochs = epoch_sequence(traj.events);
  const auto it = itinerary(traj.events);
  REQUIRE(epochs.size() >= it.size());
  double total = 0.0;
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    total += epochs[i].duration;
    CHECK(epochs[i].duration >= 0.0);
    if (i < it.size()) {
      REQUIRE(epochs[i].wall);
      CHECK(*epochs[i].wall == it[i]);
    }
  }
  CHECK(total == doctest::Approx(traj.final_state.t));
}

TEST_CASE("termination names") {
  CHECK(to_string(Termination::Escaped) == "escaped");
  CHECK(to_string(Termination::CornerCycling) == "corner-cycling");
  CHECK(to_string(Termination::NearIdealVertex) == "near-ideal-vertex");
}

TEST_CASE("runs aimed at an ideal corner end at that corner") {
  const auto b = walls_from_model(bianchi_ix());
  // Straight at the ideal vertex between walls 0 and 2.
  const Vector corner = polar(1.0, std::numbers::pi / 3);
  const auto traj = propagate_billiard(b, make_billiard_state(Vector::Zero(2), corner, 1.0));
  if (traj.termination == Termination::Escaped) {
    CHECK((std::get<Escape>(traj.events.back()).direction - corner).norm() < 1e-6);
  } else {
    CHECK(traj.termination == Termination::NearIdealVertex);
    CHECK_FALSE(traj.diagnostic.empty());
  }
}
