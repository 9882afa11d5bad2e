#pragma once

#include <array>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "toda/model.hpp"

namespace toda {

/// Worked examples addressable by name: "bianchi-ix", "prototype:<n>",
/// "scalar:<base>".
struct PresetId {
  enum class Kind { BianchiIX, Prototype, ScalarFieldExtension };

  Kind kind = Kind::BianchiIX;
  int n = 0;                              // Prototype only
  std::shared_ptr<const PresetId> base;  // ScalarFieldExtension only

  std::string name() const;
};

PresetId parse_preset(std::string_view name);
TodaModel make_preset(const PresetId& id);
inline TodaModel make_preset(std::string_view name) { return make_preset(parse_preset(name)); }

/// Mixmaster model, n = 3. Six components: three walls with A = 1/4 followed by
/// three lightlike cross terms with A = -1/2, built from the x-space potential.
TodaModel bianchi_ix();

/// x-space exponent vectors of the mixmaster potential, in component order.
std::vector<Vector> bianchi_ix_x_exponents();

/// Triples (i, j, k), 0-based, with j < k and i not in {j, k}, lexicographic.
std::vector<std::array<int, 3>> prototype_triples(int n);

/// x-space exponent 2 sum x + 2 (x^i - x^j - x^k) for one triple.
Vector prototype_x_exponent(int n, const std::array<int, 3>& triple);

/// n(n-1)(n-2)/2 walls with A = 1/4. Not the same model as bianchi_ix() at n = 3:
/// the lightlike cross terms are absent.
TodaModel prototype(int n);

/// Adds a free scalar direction: dimension n + 1, every u gets a trailing 0.
TodaModel with_scalar_field(const TodaModel& model);

}  // namespace toda
