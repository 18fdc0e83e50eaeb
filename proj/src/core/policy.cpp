#include "policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "error.hpp"

namespace nemx {

std::string_view zone_symbol(Zone zone) {
  switch (zone) {
    case Zone::kNetConsumption: return "+";
    case Zone::kNetProduction: return "-";
    case Zone::kNetZero: break;
  }
  return "0";
}

double Decision::consumption() const {
  return std::accumulate(d.begin(), d.end(), 0.0);
}

Zone classify_zone(double z) {
  if (z > kNetZeroTolerance) return Zone::kNetConsumption;
  if (z < -kNetZeroTolerance) return Zone::kNetProduction;
  return Zone::kNetZero;
}

namespace {

void require_sandwich(const Battery& battery, const NemRate& rate) {
  if (!sandwich_holds(battery, rate))
    fail(ErrorCode::kSandwich,
         "salvage sandwich violated: need export " +
             std::to_string(rate.export_rate) + " <= tau*gamma " +
             std::to_string(battery.charge_value()) + " <= gamma/rho " +
             std::to_string(battery.discharge_cost()) + " <= buy " +
             std::to_string(rate.buy));
}

Decision finish(std::vector<double> d, double e, double g, DeviceSpan devices,
                const NemRate& rate, std::size_t t) {
  Decision out;
  out.d = std::move(d);
  out.e = e;
  out.z = out.consumption() + e - g;
  out.zone = classify_zone(out.z);
  out.payment = payment(rate, out.z);
  out.surplus = total_utility(devices, out.d, t) - out.payment;
  out.priced = true;
  return out;
}

}  // namespace

Thresholds thresholds(DeviceSpan devices, const NemRate& rate,
                      const Battery& battery, std::size_t t) {
  require_sandwich(battery, rate);
  return compute_thresholds(devices, rate, battery, t);
}

Thresholds compute_thresholds(DeviceSpan devices, const NemRate& rate,
                              const Battery& battery, std::size_t t) {
  const double f_buy = aggregate_response(devices, rate.buy, t);
  const double f_discharge = aggregate_response(devices, battery.discharge_cost(), t);
  const double f_charge = aggregate_response(devices, battery.charge_value(), t);
  const double f_export = aggregate_response(devices, rate.export_rate, t);
  return {f_buy - battery.discharge_limit,
          f_discharge - battery.discharge_limit,
          f_discharge,
          f_charge,
          f_charge + battery.charge_limit,
          f_export + battery.charge_limit};
}

Regime regime_of(double g, const Thresholds& th) {
  if (g <= th.delta_plus) return Regime::kImport;
  if (g <= th.sigma_plus) return Regime::kDischargeTracking;
  if (g <= th.sigma_plus_o) return Regime::kDischargeBalance;
  if (g <= th.sigma_minus_o) return Regime::kSelfSupply;
  if (g <= th.sigma_minus) return Regime::kChargeBalance;
  if (g <= th.delta_minus) return Regime::kChargeTracking;
  return Regime::kExport;
}

Decision decide(double g, DeviceSpan devices, const NemRate& rate,
                const Battery& battery, std::size_t t) {
  return decide(g, devices, rate, battery, t,
                thresholds(devices, rate, battery, t));
}

Decision decide(double g, DeviceSpan devices, const NemRate& rate,
                const Battery& battery, std::size_t t, const Thresholds& th) {
  if (!(g >= 0.0)) fail(ErrorCode::kDomain, "generation must be nonnegative");
  const Regime regime = regime_of(g, th);
  std::vector<double> d;
  double e = 0.0;
  switch (regime) {
    case Regime::kImport:
      d = responses(devices, rate.buy, t);
      e = -battery.discharge_limit;
      break;
    case Regime::kDischargeTracking:
      d = allocate(devices, g + battery.discharge_limit, t);
      e = -battery.discharge_limit;
      break;
    case Regime::kDischargeBalance:
      d = responses(devices, battery.discharge_cost(), t);
      e = g - th.sigma_plus_o;
      break;
    case Regime::kSelfSupply:
      d = allocate(devices, g, t);
      e = 0.0;
      break;
    case Regime::kChargeBalance:
      d = responses(devices, battery.charge_value(), t);
      e = g - th.sigma_minus_o;
      break;
    case Regime::kChargeTracking:
      d = allocate(devices, g - battery.charge_limit, t);
      e = battery.charge_limit;
      break;
    case Regime::kExport:
      d = responses(devices, rate.export_rate, t);
      e = battery.charge_limit;
      break;
  }
  e = std::clamp(e, -battery.discharge_limit, battery.charge_limit);
  Decision out = finish(std::move(d), e, g, devices, rate, t);
  out.regime = regime;
  return out;
}

std::vector<PriorityClass> priority_rank(DeviceSpan devices,
                                         const NemRate& rate,
                                         const Battery& battery,
                                         std::size_t t) {
  const Thresholds th = thresholds(devices, rate, battery, t);
  const double discharge_cost = battery.discharge_cost();
  const double charge_value = battery.charge_value();
  std::vector<PriorityClass> out;
  out.reserve(devices.size());
  for (const Device& dev : devices) {
    PriorityClass pc;
    pc.id = dev.id();
    pc.baseline_load = dev.d_min() > 0.0;
    const double l = dev.marginal_utility(dev.d_min(), t);
    pc.marginal_at_min = l;
    const double f_at_l = aggregate_response(devices, l, t);
    if (l > rate.buy) {
      pc.cls = 1;
      pc.activation = "always";
    } else if (l > discharge_cost) {
      pc.cls = 2;
      pc.activation = "delta_plus";
      pc.threshold = th.delta_plus;
      pc.onset = f_at_l - battery.discharge_limit;
    } else if (l > charge_value) {
      pc.cls = 3;
      pc.activation = "sigma_plus_o";
      pc.threshold = th.sigma_plus_o;
      pc.onset = f_at_l;
    } else if (l > rate.export_rate) {
      pc.cls = 4;
      pc.activation = "sigma_minus";
      pc.threshold = th.sigma_minus;
      pc.onset = f_at_l + battery.charge_limit;
    } else {
      pc.cls = 5;
      pc.activation = "never";
    }
    // Fixed loads sit at d_min whatever their class.
    if (dev.uncontrollable()) pc.onset.reset();
    out.push_back(std::move(pc));
  }
  return out;
}

Decision passive_decide(double g, double fixed_demand, const Battery& battery) {
  if (!(fixed_demand >= 0.0))
    fail(ErrorCode::kDomain, "fixed demand must be nonnegative");
  const double residual = fixed_demand - g;
  Decision out;
  out.d = {fixed_demand};
  out.e = std::clamp(-residual, -battery.discharge_limit, battery.charge_limit);
  out.z = residual + out.e;
  out.zone = classify_zone(out.z);
  return out;
}

Decision active_dg_decide(double g, DeviceSpan devices, const NemRate& rate,
                          std::size_t t) {
  return consume_given_storage(g, 0.0, devices, rate, t);
}

Decision passive_dg_decide(double g, double fixed_demand) {
  Decision out;
  out.d = {fixed_demand};
  out.e = 0.0;
  out.z = fixed_demand - g;
  out.zone = classify_zone(out.z);
  return out;
}

Decision consume_given_storage(double g, double e, DeviceSpan devices,
                               const NemRate& rate, std::size_t t) {
  if (!(g >= 0.0)) fail(ErrorCode::kDomain, "generation must be nonnegative");
  const double available = g - e;
  const double f_buy = aggregate_response(devices, rate.buy, t);
  const double f_export = aggregate_response(devices, rate.export_rate, t);
  std::vector<double> d;
  if (available < f_buy)
    d = responses(devices, rate.buy, t);
  else if (available > f_export)
    d = responses(devices, rate.export_rate, t);
  else
    d = allocate(devices, available, t);
  return finish(std::move(d), e, g, devices, rate, t);
}

void price_decision(Decision& decision, DeviceSpan devices,
                    const NemRate& rate, std::size_t t) {
  decision.payment = payment(rate, decision.z);
  double utility = 0.0;
  if (decision.d.size() == devices.size()) {
    utility = total_utility(devices, decision.d, t);
  } else {
    std::vector<double> split = allocate(devices, decision.consumption(), t);
    utility = total_utility(devices, split, t);
  }
  decision.surplus = utility - decision.payment;
  decision.priced = true;
}

std::string_view type_name(ProsumerType type) {
  switch (type) {
    case ProsumerType::kConsumer: return "consumer";
    case ProsumerType::kPassiveDg: return "passive_dg";
    case ProsumerType::kActiveDg: return "active_dg";
    case ProsumerType::kPassiveSdg: return "passive_sdg";
    case ProsumerType::kActiveSdg: return "active_sdg";
  }
  return "consumer";
}

std::optional<ProsumerType> parse_type(std::string_view name) {
  for (ProsumerType type :
       {ProsumerType::kConsumer, ProsumerType::kPassiveDg,
        ProsumerType::kActiveDg, ProsumerType::kPassiveSdg,
        ProsumerType::kActiveSdg})
    if (type_name(type) == name) return type;
  return std::nullopt;
}

Decision decide_as(ProsumerType type, double g, DeviceSpan devices,
                   const NemRate& rate, const Battery& battery, std::size_t t) {
  if (!(g >= 0.0)) fail(ErrorCode::kDomain, "generation must be nonnegative");
  std::vector<double> passive = responses(devices, rate.buy, t);
  const double passive_total = std::accumulate(passive.begin(), passive.end(), 0.0);
  Decision out;
  switch (type) {
    case ProsumerType::kActiveSdg:
      return decide(g, devices, rate, battery, t);
    case ProsumerType::kActiveDg:
      return active_dg_decide(g, devices, rate, t);
    case ProsumerType::kConsumer:
      out = passive_dg_decide(0.0, passive_total);
      break;
    case ProsumerType::kPassiveDg:
      out = passive_dg_decide(g, passive_total);
      break;
    case ProsumerType::kPassiveSdg:
      out = passive_decide(g, passive_total, battery);
      break;
  }
  out.d = std::move(passive);
  price_decision(out, devices, rate, t);
  return out;
}

}  // namespace nemx
