#include "noc/units.hpp"

namespace noc {

PowerMw dbm_to_linear(PowerDbm p) { return PowerMw{std::pow(10.0, p.value / 10.0)}; }

PowerDbm linear_to_dbm(PowerMw p) {
  if (!(p.value > 0.0)) {
    throw ContractError("linear_to_dbm: power must be positive, got " + std::to_string(p.value));
  }
  return PowerDbm{10.0 * std::log10(p.value)};
}

}  // namespace noc
