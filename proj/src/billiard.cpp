#include <cmath>
#include <limits>
#include <stdexcept>

#include "toda/billiard.hpp"
#include "toda/geometry.hpp"

namespace toda {

Wall make_wall(Vector source, std::size_t origin_component) {
  const double s2 = source.squaredNorm();
  if (!(s2 > 1.0)) throw std::invalid_argument("make_wall: source must lie outside the unit sphere");
  Wall w;
  w.radius = std::sqrt(s2 - 1.0);
  w.source = std::move(source);
  w.origin_component = origin_component;
  return w;
}

Billiard make_billiard(int dimension, const std::vector<Vector>& sources) {
  Billiard b;
  b.dimension = dimension;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (sources[i].size() != dimension) throw std::invalid_argument("make_billiard: dimension mismatch");
    b.walls.push_back(make_wall(sources[i], i));
  }
  return b;
}

Billiard walls_from_model(const TodaModel& model, double lightlike_tolerance) {
  const auto report = validate_model(model);
  if (!report.empty()) {
    std::string msg = "walls_from_model: invalid model";
    for (const auto& v : report) msg += "; " + v.message;
    throw std::invalid_argument(msg);
  }
  Billiard b;
  b.dimension = model.dimension - 1;
  for (const auto alpha : classify_components(model, lightlike_tolerance).walls) {
    const Vector& u = model.components[alpha].u;
    Vector source = -u.tail(u.size() - 1) / u(0);
    // u^2 > 0 and u_0 > 0 force |source| > 1.
    if (!(source.squaredNorm() > 1.0))
      throw std::logic_error("walls_from_model: wall component with |v| <= 1");
    b.walls.push_back(make_wall(std::move(source), alpha));
  }
  return b;
}

bool contains(const Billiard& b, const Vector& y) {
  if (!(y.squaredNorm() < 1.0)) throw std::domain_error("contains: query point outside the unit ball");
  for (const auto& w : b.walls)
    if (!(indicator_A(y, w.source) > 0.0)) return false;
  return true;
}

Cap illuminated_cap(const Wall& w) {
  const double norm = w.source.norm();
  return {w.source / norm, 1.0 / norm};
}

bool strongly_illuminates(const Wall& w, const Vector& p) { return p.dot(w.source) > 1.0; }
bool illuminates(const Wall& w, const Vector& p) { return p.dot(w.source) >= 1.0; }

double illumination_margin(const Billiard& b, const Vector& p) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& w : b.walls) m = std::min(m, 1.0 - p.dot(w.source));
  return m;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::StronglyIlluminated: return "StronglyIlluminated";
    case Verdict::Illuminated: return "Illuminated";
    case Verdict::NotIlluminated: return "NotIlluminated";
  }
  return "unknown";
}

std::string to_string(Method m) {
  switch (m) {
    case Method::ExactArcCoverage: return "ExactArcCoverage";
    case Method::ConvexHullBound: return "ConvexHullBound";
    case Method::TopologicalBound: return "TopologicalBound";
    case Method::RandomizedSearch: return "RandomizedSearch";
  }
  return "unknown";
}

std::string regime_label(Verdict v) {
  return finite_volume(v) ? "oscillatory" : "Kasner-like";
}

}  // namespace toda
