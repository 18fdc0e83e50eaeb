#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "demand.hpp"
#include "storage.hpp"
#include "tariff.hpp"

namespace nemx {

// Generation breakpoints of the co-optimization policy for one interval.
// Always ordered delta_plus <= sigma_plus <= sigma_plus_o <= sigma_minus_o
// <= sigma_minus <= delta_minus when the salvage sandwich holds.
struct Thresholds {
  double delta_plus = 0.0;     // f(buy) - e_dis
  double sigma_plus = 0.0;     // f(gamma/rho) - e_dis
  double sigma_plus_o = 0.0;   // f(gamma/rho)
  double sigma_minus_o = 0.0;  // f(tau*gamma)
  double sigma_minus = 0.0;    // f(tau*gamma) + e_chg
  double delta_minus = 0.0;    // f(export) + e_chg

  std::array<double, 6> as_array() const {
    return {delta_plus, sigma_plus, sigma_plus_o, sigma_minus_o, sigma_minus,
            delta_minus};
  }
};

enum class Zone { kNetConsumption, kNetZero, kNetProduction };
std::string_view zone_symbol(Zone zone);  // "+", "0", "-"

// The seven generation ranges of the policy, left to right.
enum class Regime : int {
  kImport = 0,             // g <= delta_plus
  kDischargeTracking = 1,  // (delta_plus, sigma_plus]
  kDischargeBalance = 2,   // (sigma_plus, sigma_plus_o]
  kSelfSupply = 3,         // (sigma_plus_o, sigma_minus_o]
  kChargeBalance = 4,      // (sigma_minus_o, sigma_minus]
  kChargeTracking = 5,     // (sigma_minus, delta_minus]
  kExport = 6,             // g > delta_minus
};
inline constexpr int kRegimeCount = 7;

struct Decision {
  std::vector<double> d;  // per-device consumption, kWh
  double e = 0.0;         // storage action, kWh (charge > 0)
  double z = 0.0;         // net consumption, kWh
  Zone zone = Zone::kNetZero;
  double payment = 0.0;
  double surplus = 0.0;   // utility - payment, excluding salvage
  std::optional<Regime> regime;
  bool priced = false;    // payment/surplus filled in

  double consumption() const;
};

inline constexpr double kNetZeroTolerance = 1e-9;
Zone classify_zone(double z);

// Throws kSandwich when the salvage sandwich fails for this rate.
Thresholds thresholds(DeviceSpan devices, const NemRate& rate,
                      const Battery& battery, std::size_t t);
// Same values without the sandwich check; ordering is then not guaranteed.
Thresholds compute_thresholds(DeviceSpan devices, const NemRate& rate,
                              const Battery& battery, std::size_t t);

Regime regime_of(double g, const Thresholds& th);

// Optimal per-interval decision of an active solar+storage prosumer.
Decision decide(double g, DeviceSpan devices, const NemRate& rate,
                const Battery& battery, std::size_t t);
// With precomputed thresholds; the sandwich is the caller's responsibility.
Decision decide(double g, DeviceSpan devices, const NemRate& rate,
                const Battery& battery, std::size_t t, const Thresholds& th);

struct PriorityClass {
  std::string id;
  int cls = 0;  // 1..5
  // "always", "delta_plus", "sigma_plus_o", "sigma_minus", "never"
  std::string activation;
  std::optional<double> threshold;  // value of the activation threshold
  // Exact g above which the device leaves d_min (lower-bounded by threshold).
  std::optional<double> onset;
  double marginal_at_min = 0.0;  // L(d_min)
  bool baseline_load = false;    // d_min > 0 is consumed in every zone
};

std::vector<PriorityClass> priority_rank(DeviceSpan devices,
                                         const NemRate& rate,
                                         const Battery& battery,
                                         std::size_t t);

// Fixed-demand (passive) storage policy: e = clamp(g - demand, -e_dis, e_chg),
// which minimizes |z| over the feasible actions. Unpriced.
Decision passive_decide(double g, double fixed_demand, const Battery& battery);

// Solar-only active prosumer: net-zero tracking on [f(buy), f(export)].
Decision active_dg_decide(double g, DeviceSpan devices, const NemRate& rate,
                          std::size_t t);

// Solar-only passive prosumer: demand fixed, no storage. Unpriced.
Decision passive_dg_decide(double g, double fixed_demand);

// Optimal consumption for a storage action fixed in advance (used when the
// policy's action is clipped by SoC limits).
Decision consume_given_storage(double g, double e, DeviceSpan devices,
                               const NemRate& rate, std::size_t t);

// Fill payment and surplus using the given device utilities. For
// single-entry d on a multi-device set the total is split by water-filling.
void price_decision(Decision& decision, DeviceSpan devices, const NemRate& rate,
                    std::size_t t);

enum class ProsumerType { kConsumer, kPassiveDg, kActiveDg, kPassiveSdg, kActiveSdg };
std::string_view type_name(ProsumerType type);
std::optional<ProsumerType> parse_type(std::string_view name);

// Stage policy of each prosumer type. Passive types consume f(buy),
// allocated as the price-only optimum; the consumer ignores g and storage.
Decision decide_as(ProsumerType type, double g, DeviceSpan devices,
                   const NemRate& rate, const Battery& battery, std::size_t t);

}  // namespace nemx
