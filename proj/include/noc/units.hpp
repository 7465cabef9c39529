#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace noc {

/// Raised for invalid configuration (counts, ratios, missing files).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a caller violates an operation's precondition.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct PowerDbm {
  double value = 0.0;
};

/// Linear power in milliwatts. All internal arithmetic uses this unit.
struct PowerMw {
  double value = 0.0;
};

PowerMw dbm_to_linear(PowerDbm p);
PowerDbm linear_to_dbm(PowerMw p);

/// Dimensionless linear power gain in (0, 1].
struct ChannelGain {
  double value = 0.0;
};

}  // namespace noc
