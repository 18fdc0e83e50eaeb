#include "storage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "error.hpp"

namespace nemx {

Battery Battery::make(double charge_limit, double discharge_limit,
                      double charge_eff, double discharge_eff, double soc_min,
                      double soc_max, double initial_soc, double salvage) {
  for (double v : {charge_limit, discharge_limit, charge_eff, discharge_eff,
                   soc_min, soc_max, initial_soc, salvage})
    if (!std::isfinite(v))
      fail(ErrorCode::kInvalidArgument, "battery parameters must be finite");
  if (charge_limit < 0.0 || discharge_limit < 0.0)
    fail(ErrorCode::kInvalidArgument, "battery power limits must be nonnegative");
  if (!(charge_eff > 0.0 && charge_eff <= 1.0))
    fail(ErrorCode::kInvalidArgument, "charge_eff must lie in (0,1]");
  if (!(discharge_eff > 0.0 && discharge_eff <= 1.0))
    fail(ErrorCode::kInvalidArgument, "discharge_eff must lie in (0,1]");
  if (!(soc_min <= initial_soc && initial_soc <= soc_max))
    fail(ErrorCode::kInvalidArgument, "battery needs soc_min <= initial_soc <= soc_max");
  if (salvage < 0.0)
    fail(ErrorCode::kInvalidArgument, "salvage rate must be nonnegative");
  return {charge_limit, discharge_limit, charge_eff, discharge_eff,
          soc_min,      soc_max,         initial_soc, salvage};
}

Battery Battery::none() { return {}; }

double Battery::soc_step(double soc, double e) const {
  if (e > charge_limit || e < -discharge_limit)
    fail(ErrorCode::kDomain, "storage action " + std::to_string(e) +
                                 " outside power limits");
  return soc + charge_eff * positive_part(e) - negative_part(e) / discharge_eff;
}

double Battery::salvage_increment(double e) const {
  return salvage *
         (charge_eff * positive_part(e) - negative_part(e) / discharge_eff);
}

ActionInterval feasible_action_interval(double soc, const Battery& battery) {
  double headroom = std::max(0.0, battery.soc_max - soc);
  double stored = std::max(0.0, soc - battery.soc_min);
  return {-std::min(battery.discharge_limit, stored * battery.discharge_eff),
          std::min(battery.charge_limit, headroom / battery.charge_eff)};
}

bool sandwich_holds(const Battery& battery, const NemRate& rate) {
  double slack = kSandwichSlack * std::max(1.0, rate.buy);
  return rate.export_rate <= battery.charge_value() + slack &&
         battery.discharge_cost() <= rate.buy + slack;
}

SandwichReport check_salvage_sandwich(const Battery& battery,
                                      std::span<const NemRate> rates) {
  SandwichReport report;
  report.charge_value = battery.charge_value();
  report.discharge_cost = battery.discharge_cost();
  report.min_buy_rate = rates.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < rates.size(); ++t) {
    report.max_export_rate = std::max(report.max_export_rate, rates[t].export_rate);
    report.min_buy_rate = std::min(report.min_buy_rate, rates[t].buy);
    if (!sandwich_holds(battery, rates[t])) report.violations.push_back(t);
  }
  report.pass = report.violations.empty();
  return report;
}

double sandwich_midpoint_salvage(double charge_eff, double discharge_eff,
                                 std::span<const NemRate> rates) {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  for (const NemRate& r : rates) {
    lo = std::max(lo, r.export_rate / charge_eff);
    hi = std::min(hi, r.buy * discharge_eff);
  }
  if (rates.empty() || lo > hi) return -1.0;
  return 0.5 * (lo + hi);
}

}  // namespace nemx
