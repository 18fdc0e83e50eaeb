#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tariff.hpp"

namespace nemx {

// Behind-the-meter battery. Energies are per interval (kWh), e > 0 charges.
struct Battery {
  double charge_limit = 0.0;     // e-bar
  double discharge_limit = 0.0;  // e-underbar
  double charge_eff = 1.0;       // tau in (0,1]
  double discharge_eff = 1.0;    // rho in (0,1]
  double soc_min = 0.0;
  double soc_max = 0.0;
  double initial_soc = 0.0;
  double salvage = 0.0;          // gamma, $/kWh of stored energy

  static Battery make(double charge_limit, double discharge_limit,
                      double charge_eff, double discharge_eff, double soc_min,
                      double soc_max, double initial_soc, double salvage);
  static Battery none();

  double charge_value() const { return charge_eff * salvage; }       // tau*gamma
  double discharge_cost() const { return salvage / discharge_eff; }  // gamma/rho
  bool has_power() const { return charge_limit > 0.0 || discharge_limit > 0.0; }

  // s + tau*[e]+ - [e]-/rho; e must respect the power limits.
  double soc_step(double soc, double e) const;

  // Change in stored value for action e: gamma*(tau*[e]+ - [e]-/rho).
  double salvage_increment(double e) const;
};

struct ActionInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// Actions e keeping soc_step(soc, e) within [soc_min, soc_max].
ActionInterval feasible_action_interval(double soc, const Battery& battery);

struct SandwichReport {
  bool pass = true;
  double max_export_rate = 0.0;
  double min_buy_rate = 0.0;
  double charge_value = 0.0;    // tau*gamma
  double discharge_cost = 0.0;  // gamma/rho
  std::vector<std::size_t> violations;  // interval indices
};

// max export <= tau*gamma <= gamma/rho <= min buy over all rates.
SandwichReport check_salvage_sandwich(const Battery& battery,
                                      std::span<const NemRate> rates);
bool sandwich_holds(const Battery& battery, const NemRate& rate);

// Midpoint of the admissible salvage interval for the given rates, or a
// negative value when the interval is empty.
double sandwich_midpoint_salvage(double charge_eff, double discharge_eff,
                                 std::span<const NemRate> rates);

inline constexpr double kSandwichSlack = 1e-12;

}  // namespace nemx
