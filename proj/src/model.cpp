#include "toda/model.hpp"

#include <cmath>
#include <sstream>

namespace toda {

namespace {

std::string component_message(std::size_t index, const std::string& what) {
  std::ostringstream os;
  os << "component " << index << ": " << what;
  return os.str();
}

}  // namespace

std::string to_string(Restriction r) {
  switch (r) {
    case Restriction::Dimension: return "dimension n >= 3";
    case Restriction::VectorLength: return "u has n entries";
    case Restriction::NonzeroCoupling: return "A != 0";
    case Restriction::PositiveWallCoupling: return "A > 0 whenever u^2 > 0";
    case Restriction::PositiveTimeComponent: return "u_0 > 0 for every component";
  }
  return "unknown";
}

std::string to_string(ComponentClass c) {
  switch (c) {
    case ComponentClass::Wall: return "wall";
    case ComponentClass::Lightlike: return "lightlike";
    case ComponentClass::Timelike: return "timelike";
  }
  return "unknown";
}

ValidationReport validate_model(const TodaModel& model) {
  ValidationReport report;
  if (model.dimension < 3) {
    report.push_back({std::nullopt, Restriction::Dimension,
                      "dimension " + std::to_string(model.dimension) + " violates " +
                          to_string(Restriction::Dimension)});
  }
  for (std::size_t i = 0; i < model.components.size(); ++i) {
    const auto& c = model.components[i];
    if (c.u.size() != model.dimension || c.u.size() < 2) {
      report.push_back({i, Restriction::VectorLength,
                        component_message(i, "u has " + std::to_string(c.u.size()) +
                                                 " entries, expected " +
                                                 std::to_string(model.dimension))});
      continue;
    }
    if (!(c.coupling != 0.0) || !std::isfinite(c.coupling)) {
      report.push_back({i, Restriction::NonzeroCoupling,
                        component_message(i, "coupling must be finite and nonzero")});
    }
    if (!(c.u(0) > 0.0)) {
      report.push_back({i, Restriction::PositiveTimeComponent,
                        component_message(i, "u_0 = " + std::to_string(c.u(0)) +
                                                 " violates restriction " +
                                                 to_string(Restriction::PositiveTimeComponent))});
    }
    if (classify_vector(c.u) == ComponentClass::Wall && c.coupling < 0.0) {
      report.push_back({i, Restriction::PositiveWallCoupling,
                        component_message(i, "u^2 > 0 with A = " + std::to_string(c.coupling) +
                                                 " violates restriction " +
                                                 to_string(Restriction::PositiveWallCoupling))});
    }
  }
  return report;
}

ComponentClass classify_vector(const Vector& u, double tolerance) {
  const double sq = minkowski_square(u);
  const double band = tolerance * std::max(1.0, u.squaredNorm());
  if (std::abs(sq) <= band) return ComponentClass::Lightlike;
  return sq > 0.0 ? ComponentClass::Wall : ComponentClass::Timelike;
}

Classification classify_components(const TodaModel& model, double tolerance) {
  Classification out;
  out.classes.reserve(model.components.size());
  for (std::size_t i = 0; i < model.components.size(); ++i) {
    const auto cls = classify_vector(model.components[i].u, tolerance);
    out.classes.push_back(cls);
    if (cls == ComponentClass::Wall) out.walls.push_back(i);
  }
  return out;
}

Matrix x_to_z_matrix(int n) {
  if (n < 2) throw std::invalid_argument("x_to_z_matrix: n must be at least 2");
  Matrix m = Matrix::Zero(n, n);
  const double q = std::sqrt(static_cast<double>(n) / (n - 1));
  m.row(0).setConstant(1.0 / q);
  // Row a (1-based) is c_a * sum_{j > a} (x^j - x^a), an orthonormal Helmert basis
  // of the sum-zero subspace.
  for (int a = 1; a < n; ++a) {
    const double c = 1.0 / std::sqrt(static_cast<double>((n - a + 1) * (n - a)));
    m(a, a - 1) = -c * (n - a);
    for (int j = a; j < n; ++j) m(a, j) = c;
  }
  return m;
}

Vector x_to_z(const Vector& x) {
  return x_to_z_matrix(static_cast<int>(x.size())) * x;
}

Vector exponent_transform(const Vector& w) {
  const Matrix m = x_to_z_matrix(static_cast<int>(w.size()));
  // w . x = u . (M x)  for all x  <=>  M^T u = w
  return m.transpose().fullPivLu().solve(w);
}

}  // namespace toda
