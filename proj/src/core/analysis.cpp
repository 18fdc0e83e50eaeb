#include "analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "error.hpp"

namespace nemx {

ZoneReport net_zero_zone(ProsumerType type, const StageConfig& stage) {
  const NemRate& rate = stage.rate;
  const Battery& bat = stage.battery;
  if (!sandwich_holds(bat, rate))
    fail(ErrorCode::kSandwich, "net-zero zone needs the salvage sandwich to hold");
  const double f_buy = aggregate_response(stage.devices, rate.buy, stage.t);
  const double f_export = aggregate_response(stage.devices, rate.export_rate, stage.t);
  ZoneReport out;
  out.type = type;
  switch (type) {
    case ProsumerType::kPassiveDg:
      out.g_lo = out.g_hi = f_buy;
      break;
    case ProsumerType::kActiveDg:
      out.g_lo = f_buy;
      out.g_hi = f_export;
      break;
    case ProsumerType::kPassiveSdg:
      out.g_lo = f_buy - bat.discharge_limit;
      out.g_hi = f_buy + bat.charge_limit;
      break;
    case ProsumerType::kActiveSdg:
      out.g_lo = f_buy - bat.discharge_limit;
      out.g_hi = f_export + bat.charge_limit;
      break;
    case ProsumerType::kConsumer:
      fail(ErrorCode::kInvalidArgument, "consumers have no net-zero zone");
  }
  out.length = out.g_hi - out.g_lo;
  return out;
}

ZoneComparison compare_zones(const StageConfig& stage) {
  ZoneComparison out;
  const ProsumerType order[] = {ProsumerType::kPassiveDg, ProsumerType::kActiveDg,
                                ProsumerType::kPassiveSdg, ProsumerType::kActiveSdg};
  for (std::size_t i = 0; i < 4; ++i) out.zones[i] = net_zero_zone(order[i], stage);
  const double l1 = out.zones[0].length;
  const double l2 = out.zones[1].length;
  const double l3 = out.zones[2].length;
  const double l4 = out.zones[3].length;
  out.identity_residual = l4 - l2 - l3;
  out.storage_span_dominates =
      l2 <= stage.battery.charge_limit + stage.battery.discharge_limit;
  const double tol = 1e-9 * std::max(1.0, l4);
  out.ordering_holds = out.storage_span_dominates
                           ? (l4 + tol >= l3 && l3 + tol >= l2 && l2 + tol >= l1)
                           : (l4 + tol >= l2 && l2 + tol >= l3 && l3 + tol >= l1);
  return out;
}

ZoneSweep sweep_zone(const ZoneReport& zone, const StageConfig& stage,
                     std::size_t samples) {
  ZoneSweep out;
  out.min_abs_z_outside = std::numeric_limits<double>::infinity();
  auto abs_z = [&](double g) {
    return std::abs(decide_as(zone.type, g, stage.devices, stage.rate,
                              stage.battery, stage.t).z);
  };
  const double lo = std::max(0.0, zone.g_lo);
  const double hi = zone.g_hi;
  if (hi >= lo && samples > 0) {
    for (std::size_t i = 0; i < samples; ++i) {
      double frac = samples == 1 ? 0.5 : static_cast<double>(i) / (samples - 1);
      out.max_abs_z_inside = std::max(out.max_abs_z_inside, abs_z(lo + (hi - lo) * frac));
      ++out.inside_samples;
    }
  }
  const double span = std::max(1.0, hi - lo);
  const std::size_t half = std::max<std::size_t>(1, samples / 2);
  for (std::size_t i = 0; i < half; ++i) {
    if (lo > 0.0) {
      out.min_abs_z_outside = std::min(out.min_abs_z_outside,
                                       abs_z(lo * static_cast<double>(i) / half));
      ++out.outside_samples;
    }
    double above = std::max(hi, 0.0) + span * static_cast<double>(i + 1) / half;
    out.min_abs_z_outside = std::min(out.min_abs_z_outside, abs_z(above));
    ++out.outside_samples;
  }
  return out;
}

std::string_view quantity_name(Quantity q) {
  switch (q) {
    case Quantity::kConsumption: return "d";
    case Quantity::kStorage: return "e";
    case Quantity::kPayment: return "P";
    case Quantity::kSurplus: return "S";
  }
  return "?";
}

std::string_view parameter_name(Parameter p) {
  switch (p) {
    case Parameter::kGeneration: return "g";
    case Parameter::kBuyRate: return "buy_rate";
    case Parameter::kExportRate: return "export_rate";
    case Parameter::kSalvage: return "salvage";
    case Parameter::kFixedCharge: return "fixed_charge";
  }
  return "?";
}

std::string_view sign_name(Sign s) {
  switch (s) {
    case Sign::kIncreasing: return "increasing";
    case Sign::kDecreasing: return "decreasing";
    case Sign::kUnchanged: return "unchanged";
    case Sign::kIndeterminate: return "indeterminate";
  }
  return "?";
}

Sign expected_sign(Quantity q, Zone zone, Parameter p) {
  constexpr Sign U = Sign::kUnchanged;
  constexpr Sign I = Sign::kIncreasing;
  constexpr Sign D = Sign::kDecreasing;
  constexpr Sign X = Sign::kIndeterminate;
  // [quantity][zone: +, -, 0][parameter: g, buy, export, salvage, fixed]
  static constexpr Sign table[4][3][5] = {
      {{U, D, U, U, U}, {U, U, D, U, U}, {I, U, U, D, U}},  // d*
      {{U, U, U, U, U}, {U, U, U, U, U}, {I, U, U, I, U}},  // e*
      {{D, X, U, U, I}, {D, U, D, U, I}, {U, U, U, U, I}},  // P*
      {{I, D, U, U, D}, {I, U, I, U, D}, {I, U, U, D, D}},  // S*
  };
  int zi = zone == Zone::kNetConsumption ? 0 : zone == Zone::kNetProduction ? 1 : 2;
  return table[static_cast<int>(q)][zi][static_cast<int>(p)];
}

namespace {

// Probe points: interior of zone + and - and the midpoint of every nonempty
// net-zero policy range.
std::vector<double> probe_points(Zone zone, const Thresholds& th) {
  std::vector<double> points;
  switch (zone) {
    case Zone::kNetConsumption:
      if (th.delta_plus > 0.0) points.push_back(0.5 * th.delta_plus);
      break;
    case Zone::kNetProduction:
      points.push_back(th.delta_minus + std::max(1.0, th.delta_minus));
      break;
    case Zone::kNetZero: {
      auto bounds = th.as_array();
      for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
        double lo = std::max(0.0, bounds[i]);
        double hi = bounds[i + 1];
        if (hi > lo) points.push_back(0.5 * (lo + hi));
      }
      break;
    }
  }
  return points;
}

std::vector<double> quantity_values(Quantity q, const Decision& dec) {
  switch (q) {
    case Quantity::kConsumption: return dec.d;
    case Quantity::kStorage: return {dec.e};
    case Quantity::kPayment: return {dec.payment};
    case Quantity::kSurplus: return {dec.surplus};
  }
  return {};
}

std::optional<std::pair<StageConfig, double>> perturb(const StageConfig& stage,
                                                      double g, Parameter p,
                                                      double eps) {
  StageConfig out = stage;
  double g_out = g;
  try {
    switch (p) {
      case Parameter::kGeneration: g_out = g + eps; break;
      case Parameter::kBuyRate:
        out.rate = NemRate::make(stage.rate.buy + eps, stage.rate.export_rate, stage.rate.fixed);
        break;
      case Parameter::kExportRate:
        out.rate = NemRate::make(stage.rate.buy, stage.rate.export_rate + eps, stage.rate.fixed);
        break;
      case Parameter::kSalvage: out.battery.salvage += eps; break;
      case Parameter::kFixedCharge: out.rate.fixed += eps; break;
    }
  } catch (const Error&) {
    return std::nullopt;
  }
  if (!sandwich_holds(out.battery, out.rate)) return std::nullopt;
  return std::make_pair(std::move(out), g_out);
}

Sign combine(const std::vector<double>& deltas) {
  bool any_up = false;
  bool any_down = false;
  for (double d : deltas) {
    if (d > kUnchangedTolerance) any_up = true;
    if (d < -kUnchangedTolerance) any_down = true;
  }
  if (any_up && any_down) return Sign::kIndeterminate;
  if (any_up) return Sign::kIncreasing;
  if (any_down) return Sign::kDecreasing;
  return Sign::kUnchanged;
}

}  // namespace

StaticsReport statics_probe(Quantity quantity, Zone zone, Parameter parameter,
                            const StageConfig& stage, double epsilon) {
  const Thresholds th = thresholds(stage.devices, stage.rate, stage.battery, stage.t);
  StaticsReport report;
  report.quantity = quantity;
  report.zone = zone;
  report.parameter = parameter;
  report.expected = expected_sign(quantity, zone, parameter);
  report.determinate = report.expected != Sign::kIndeterminate;
  report.probe_points = probe_points(zone, th);
  if (report.probe_points.empty())
    fail(ErrorCode::kNoInteriorPoint,
         "zone " + std::string(zone_symbol(zone)) + " has no interior point");

  std::vector<double> deltas;
  double smallest = epsilon;
  for (double g : report.probe_points) {
    const Decision base = decide(g, stage.devices, stage.rate, stage.battery, stage.t, th);
    const Regime regime = *base.regime;
    std::optional<Decision> moved;
    double eps = epsilon;
    for (int halving = 0; halving <= kProbeHalvings && !moved; ++halving, eps *= 0.5) {
      auto candidate = perturb(stage, g, parameter, eps);
      if (!candidate) continue;
      const auto& [cfg, g2] = *candidate;
      Thresholds th2 = thresholds(cfg.devices, cfg.rate, cfg.battery, cfg.t);
      if (regime_of(g2, th2) != regime) continue;
      moved = decide(g2, cfg.devices, cfg.rate, cfg.battery, cfg.t, th2);
      smallest = std::min(smallest, eps);
    }
    if (!moved)
      fail(ErrorCode::kProbeFailed,
           "could not keep g=" + std::to_string(g) + " in its policy range while perturbing " +
               std::string(parameter_name(parameter)));
    auto before = quantity_values(quantity, base);
    auto after = quantity_values(quantity, *moved);
    for (std::size_t i = 0; i < before.size(); ++i) deltas.push_back(after[i] - before[i]);
  }
  report.epsilon = smallest;
  report.observed = combine(deltas);
  report.pass = !report.determinate || report.observed == report.expected;
  return report;
}

std::vector<StaticsReport> statics_table(const StageConfig& stage) {
  std::vector<StaticsReport> out;
  for (Quantity q : kQuantities)
    for (Zone z : kZones)
      for (Parameter p : kParameters) out.push_back(statics_probe(q, z, p, stage));
  return out;
}

double self_consumption(std::span<const double> z_trace,
                        std::span<const double> g_trace) {
  if (z_trace.size() != g_trace.size())
    fail(ErrorCode::kInvalidArgument, "self-consumption traces differ in length");
  double exported = 0.0;
  double generated = 0.0;
  for (std::size_t t = 0; t < z_trace.size(); ++t) {
    exported += negative_part(z_trace[t]);
    generated += g_trace[t];
  }
  if (!(generated > 0.0))
    fail(ErrorCode::kUndefinedRatio, "self-consumption undefined without generation");
  return std::clamp(1.0 - exported / generated, 0.0, 1.0);
}

double surplus_gain(double candidate, double benchmark) {
  if (!(benchmark > 0.0))
    fail(ErrorCode::kGainUndefined, "surplus gain needs a positive benchmark surplus");
  return 100.0 * (candidate - benchmark) / benchmark;
}

}  // namespace nemx
