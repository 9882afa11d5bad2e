#include "toda/presets.hpp"

#include <charconv>
#include <stdexcept>

namespace toda {

std::string PresetId::name() const {
  switch (kind) {
    case Kind::BianchiIX: return "bianchi-ix";
    case Kind::Prototype: return "prototype:" + std::to_string(n);
    case Kind::ScalarFieldExtension: return "scalar:" + (base ? base->name() : std::string{});
  }
  return {};
}

PresetId parse_preset(std::string_view name) {
  PresetId id;
  if (name == "bianchi-ix") {
    id.kind = PresetId::Kind::BianchiIX;
    return id;
  }
  constexpr std::string_view proto = "prototype:";
  constexpr std::string_view scalar = "scalar:";
  if (name.starts_with(proto)) {
    const auto digits = name.substr(proto.size());
    int n = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty())
      throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
    if (n <= 2) throw std::invalid_argument("prototype preset requires n > 2");
    id.kind = PresetId::Kind::Prototype;
    id.n = n;
    return id;
  }
  if (name.starts_with(scalar)) {
    id.kind = PresetId::Kind::ScalarFieldExtension;
    id.base = std::make_shared<const PresetId>(parse_preset(name.substr(scalar.size())));
    return id;
  }
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

TodaModel make_preset(const PresetId& id) {
  switch (id.kind) {
    case PresetId::Kind::BianchiIX: return bianchi_ix();
    case PresetId::Kind::Prototype: return prototype(id.n);
    case PresetId::Kind::ScalarFieldExtension:
      if (!id.base) throw std::invalid_argument("scalar preset without a base");
      return with_scalar_field(make_preset(*id.base));
  }
  throw std::invalid_argument("unknown preset kind");
}

std::vector<Vector> bianchi_ix_x_exponents() {
  // Ordered so that the z-space vectors come out as u^1 = (4/sqrt6)(1, 1, -sqrt3),
  // u^2 = (4/sqrt6)(1, 1, sqrt3), u^3 = (4/sqrt6)(1, -2, 0), u^{3+a} half-sums.
  return {Vector::Unit(3, 1) * 4.0,
          Vector::Unit(3, 2) * 4.0,
          Vector::Unit(3, 0) * 4.0,
          (Vector(3) << 0.0, 2.0, 2.0).finished(),
          (Vector(3) << 2.0, 2.0, 0.0).finished(),
          (Vector(3) << 2.0, 0.0, 2.0).finished()};
}

TodaModel bianchi_ix() {
  TodaModel m;
  m.dimension = 3;
  const auto exps = bianchi_ix_x_exponents();
  for (std::size_t i = 0; i < exps.size(); ++i) {
    m.components.push_back({i < 3 ? 0.25 : -0.5, exponent_transform(exps[i])});
  }
  return m;
}

std::vector<std::array<int, 3>> prototype_triples(int n) {
  std::vector<std::array<int, 3>> out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        if (i != j && i != k) out.push_back({i, j, k});
  return out;
}

Vector prototype_x_exponent(int n, const std::array<int, 3>& triple) {
  Vector w = Vector::Constant(n, 2.0);
  w(triple[0]) += 2.0;
  w(triple[1]) -= 2.0;
  w(triple[2]) -= 2.0;
  return w;
}

TodaModel prototype(int n) {
  if (n <= 2) throw std::invalid_argument("prototype: n must exceed 2");
  TodaModel m;
  m.dimension = n;
  for (const auto& t : prototype_triples(n))
    m.components.push_back({0.25, exponent_transform(prototype_x_exponent(n, t))});
  return m;
}

TodaModel with_scalar_field(const TodaModel& model) {
  TodaModel out;
  out.dimension = model.dimension + 1;
  for (const auto& c : model.components) {
    Vector u = Vector::Zero(c.u.size() + 1);
    u.head(c.u.size()) = c.u;
    out.components.push_back({c.coupling, std::move(u)});
  }
  return out;
}

}  // namespace toda
