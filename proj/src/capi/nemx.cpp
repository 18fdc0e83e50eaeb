#include "nemx/nemx.h"

#include <cstdio>
#include <cstring>
#include <string>

#include <json.hpp>

#include "analysis.hpp"
#include "config.hpp"
#include "error.hpp"
#include "oracle.hpp"
#include "sim.hpp"

struct nemx_scenario {
  nemx::ScenarioConfig config;
};

namespace {

using nlohmann::ordered_json;

thread_local std::string g_last_error;

nemx_status record(nemx_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
nemx_status guarded(Fn fn) {
  try {
    fn();
    g_last_error.clear();
    return NEMX_OK;
  } catch (const nemx::Error& err) {
    return record(static_cast<nemx_status>(static_cast<int>(err.code())), err.what());
  } catch (const std::bad_alloc&) {
    return record(NEMX_E_INTERNAL, "out of memory");
  } catch (const std::exception& err) {
    return record(NEMX_E_INTERNAL, err.what());
  }
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* what) {
  if (p == nullptr)
    nemx::fail(nemx::ErrorCode::kInvalidArgument, std::string(what) + " must not be null");
}

std::size_t interval(const nemx_scenario* s, long t) {
  if (t < 0) return s->config.analysis_t;
  auto at = static_cast<std::size_t>(t);
  if (!s->config.tariff || at >= s->config.tariff->horizon())
    nemx::fail(nemx::ErrorCode::kRange, "interval " + std::to_string(t) + " outside horizon");
  return at;
}

ordered_json rate_json(const nemx::NemRate& r) {
  return {{"buy", r.buy}, {"export", r.export_rate}, {"fixed", r.fixed}};
}

ordered_json optional_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

extern "C" {

const char* nemx_version(void) { return "0.1.0"; }

const char* nemx_last_error(void) { return g_last_error.c_str(); }

void nemx_string_free(char* s) { std::free(s); }

nemx_status nemx_scenario_load(const char* path, int has_seed, uint64_t seed,
                               nemx_scenario** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    auto cfg = nemx::parse_config(path, has_seed ? std::optional<std::uint64_t>(seed)
                                                 : std::nullopt);
    *out = new nemx_scenario{std::move(cfg)};
  });
}

nemx_status nemx_scenario_parse(const char* json_text, const char* base_dir, int has_seed,
                                uint64_t seed, nemx_scenario** out) {
  return guarded([&] {
    require(json_text, "json_text");
    require(out, "out");
    *out = nullptr;
    auto cfg = nemx::parse_config_text(
        json_text, base_dir ? base_dir : ".",
        has_seed ? std::optional<std::uint64_t>(seed) : std::nullopt);
    *out = new nemx_scenario{std::move(cfg)};
  });
}

void nemx_scenario_free(nemx_scenario* scenario) { delete scenario; }

uint64_t nemx_scenario_seed(const nemx_scenario* scenario) {
  return scenario ? scenario->config.seed : 0;
}

size_t nemx_scenario_horizon(const nemx_scenario* scenario) {
  return scenario && scenario->config.tariff ? scenario->config.tariff->horizon() : 0;
}

nemx_status nemx_thresholds(const nemx_scenario* scenario, long t, double out[6]) {
  return guarded([&] {
    require(scenario, "scenario");
    require(out, "out");
    auto stage = scenario->config.stage(interval(scenario, t));
    auto th = nemx::thresholds(stage.devices, stage.rate, stage.battery, stage.t);
    auto values = th.as_array();
    std::copy(values.begin(), values.end(), out);
  });
}

nemx_status nemx_thresholds_json(const nemx_scenario* scenario, long t, char** out) {
  return guarded([&] {
    require(scenario, "scenario");
    require(out, "out");
    auto stage = scenario->config.stage(interval(scenario, t));
    auto th = nemx::thresholds(stage.devices, stage.rate, stage.battery, stage.t);
    ordered_json j{{"t", stage.t},
                   {"delta_plus", th.delta_plus},
                   {"sigma_plus", th.sigma_plus},
                   {"sigma_plus_o", th.sigma_plus_o},
                   {"sigma_minus_o", th.sigma_minus_o},
                   {"sigma_minus", th.sigma_minus},
                   {"delta_minus", th.delta_minus},
                   {"rate", rate_json(stage.rate)},
                   {"charge_value", stage.battery.charge_value()},
                   {"discharge_cost", stage.battery.discharge_cost()}};
    *out = duplicate(dump(j));
  });
}

nemx_status nemx_decide_json(const nemx_scenario* scenario, const double* g, size_t count,
                             long t, char** out) {
  return guarded([&] {
    require(scenario, "scenario");
    require(out, "out");
    const auto& cfg = scenario->config;
    std::vector<double> values;
    if (count > 0) {
      require(g, "g");
      values.assign(g, g + count);
    } else {
      values = cfg.analysis_g;
    }
    if (values.empty())
      nemx::fail(nemx::ErrorCode::kInvalidArgument,
                 "no generation values (pass --g or set analysis.g)");
    auto stage = cfg.stage(interval(scenario, t));
    ordered_json list = ordered_json::array();
    for (double gv : values) {
      auto dec = nemx::decide_as(cfg.type, gv, stage.devices, stage.rate, stage.battery,
                                 stage.t);
      ordered_json d = ordered_json::array();
      for (double v : dec.d) d.push_back(v);
      list.push_back({{"g", gv},
                      {"d", d},
                      {"consumption", dec.consumption()},
                      {"e", dec.e},
                      {"z", dec.z},
                      {"zone", std::string(nemx::zone_symbol(dec.zone))},
                      {"regime", dec.regime ? ordered_json(static_cast<int>(*dec.regime))
                                            : ordered_json(nullptr)},
                      {"payment", dec.payment},
                      {"surplus", dec.surplus},
                      {"salvage", stage.battery.salvage_increment(dec.e)}});
    }
    ordered_json devices = ordered_json::array();
    for (const auto& dev : stage.devices) devices.push_back(dev.id());
    ordered_json j{{"t", stage.t},
                   {"type", std::string(nemx::type_name(cfg.type))},
                   {"rate", rate_json(stage.rate)},
                   {"devices", devices},
                   {"decisions", list}};
    *out = duplicate(dump(j));
  });
}

nemx_status nemx_rank_json(const nemx_scenario* scenario, long t, char** out) {
  return guarded([&] {
    require(scenario, "scenario");
    require(out, "out");
    auto stage = scenario->config.stage(interval(scenario, t));
    auto ranks = nemx::priority_rank(stage.devices, stage.rate, stage.battery, stage.t);
    ordered_json list = ordered_json::array();
    for (const auto& pc : ranks)
      list.push_back({{"id", pc.id},
                      {"class", pc.cls},
                      {"activation", pc.activation},
                      {"threshold", optional_json(pc.threshold)},
                      {"onset", optional_json(pc.onset)},
                      {"marginal_at_min", pc.marginal_at_min},
                      {"baseline_load", pc.baseline_load}});
    ordered_json j{{"t", stage.t}, {"rate", rate_json(stage.rate)}, {"devices", list}};
    *out = duplicate(dump(j));
  });
}

nemx_status nemx_zones_json(const nemx_scenario* scenario, long t, char** out, int* pass) {
  return guarded([&] {
    require(scenario, "scenario");
    require(out, "out");
    auto stage = scenario->config.stage(interval(scenario, t));
    auto cmp = nemx::compare_zones(stage);
    bool ok = std::abs(cmp.identity_residual) <= 1e-9 && cmp.ordering_holds;
    ordered_json zones = ordered_json::array();
    for (const auto& zone : cmp.zones) {
      auto sweep = nemx::sweep_zone(zone, stage, 512);
      bool confirmed = sweep.max_abs_z_inside <= nemx::kNetZeroTolerance &&
                       (sweep.outside_samples == 0 ||
                        sweep.min_abs_z_outside > nemx::kNetZeroTolerance);
      ok = ok && confirmed;
      zones.push_back({{"type", std::string(nemx::type_name(zone.type))},
                       {"g_lo", zone.g_lo},
                       {"g_hi", zone.g_hi},
                       {"length", zone.length},
                       {"max_abs_z_inside", sweep.max_abs_z_inside},
                       {"min_abs_z_outside", sweep.outside_samples
                                                 ? ordered_json(sweep.min_abs_z_outside)
                                                 : ordered_json(nullptr)},
                       {"confirmed", confirmed}});
    }
    ordered_json j{{"t", stage.t},
                   {"zones", zones},
                   {"identity_residual", cmp.identity_residual},
                   {"storage_span_dominates", cmp.storage_span_dominates},
                   {"ordering_holds", cmp.ordering_holds},
                   {"pass", ok}};
    *out = duplicate(dump(j));
    if (pass) *pass = ok ? 1 : 0;
  });
}

nemx_status nemx_statics_csv(const nemx_scenario* scenario, long t, char** out, int* pass) {
  return guarded([&] {
    require(scenario, "scenario");
    require(out, "out");
    auto stage = scenario->config.stage(interval(scenario, t));
    auto table = nemx::statics_table(stage);
    std::string csv = "quantity,zone,parameter,expected,observed,determinate,result,epsilon\n";
    bool ok = true;
    for (const auto& cell : table) {
      ok = ok && cell.pass;
      csv += std::string(nemx::quantity_name(cell.quantity)) + "," +
             std::string(nemx::zone_symbol(cell.zone)) + "," +
             std::string(nemx::parameter_name(cell.parameter)) + "," +
             std::string(nemx::sign_name(cell.expected)) + "," +
             std::string(nemx::sign_name(cell.observed)) + "," +
             (cell.determinate ? "1" : "0") + "," +
             (!cell.determinate ? "REPORTED" : cell.pass ? "PASS" : "FAIL") + "," +
             num(cell.epsilon) + "\n";
    }
    *out = duplicate(csv);
    if (pass) *pass = ok ? 1 : 0;
  });
}

nemx_status nemx_verify_json(const nemx_scenario* scenario, long t, size_t samples,
                             double resolution, char** out, int* pass) {
  return guarded([&] {
    require(scenario, "scenario");
    require(out, "out");
    const auto& cfg = scenario->config;
    auto stage = cfg.stage(interval(scenario, t));
    const std::size_t n = samples > 0 ? samples : cfg.verify.samples;
    const double res = resolution > 0.0 ? resolution : cfg.verify.resolution;
    auto g = nemx::certification_samples(stage, n, cfg.seed);
    auto report = nemx::certify(stage, g, res);
    ordered_json list = ordered_json::array();
    for (const auto& s : report.samples)
      list.push_back({{"g", s.g},
                      {"policy_objective", s.policy_objective},
                      {"oracle_objective", s.oracle_objective},
                      {"relative_gap", s.relative_gap},
                      {"distance", s.distance}});
    ordered_json j{{"t", stage.t},
                   {"seed", cfg.seed},
                   {"samples", report.samples.size()},
                   {"resolution", report.resolution},
                   {"max_gap", report.max_gap},
                   {"gap_tolerance", report.gap_tolerance},
                   {"max_distance", report.max_distance},
                   {"distance_tolerance", report.distance_tolerance},
                   {"pass", report.pass},
                   {"points", list}};
    *out = duplicate(dump(j));
    if (pass) *pass = report.pass ? 1 : 0;
  });
}

nemx_status nemx_simulate(const nemx_scenario* scenario, char** report, char** intervals) {
  return guarded([&] {
    require(scenario, "scenario");
    require(report, "report");
    const auto& cfg = scenario->config;
    auto sc = cfg.scenario();
    auto rep = nemx::run(sc, nemx::SimOptions{intervals != nullptr});
    ordered_json warnings = ordered_json::array();
    for (const auto& w : rep.warnings) warnings.push_back(w);
    ordered_json j{
        {"type", std::string(nemx::type_name(rep.type))},
        {"horizon", rep.horizon},
        {"days", rep.days},
        {"netting_intervals", sc.tariff.netting_intervals()},
        {"totals",
         {{"utility", rep.totals.utility},
          {"payment", rep.totals.payment},
          {"salvage", rep.totals.salvage},
          {"surplus", rep.totals.surplus},
          {"imports", rep.totals.imports},
          {"exports", rep.totals.exports},
          {"generation", rep.totals.generation}}},
        {"daily_surplus", rep.daily_surplus},
        {"self_consumption", optional_json(rep.self_consumption)},
        {"clip_events", rep.clip_events},
        {"billing_windows", rep.bills.size()},
        {"straddling_windows", rep.straddling_windows},
        {"sandwich_ok", rep.sandwich_ok},
        {"warnings", warnings}};
    std::string csv;
    if (intervals) {
      csv = "t,timestamp,generation_kwh,baseline_kwh,consumption_kwh,storage_kwh,net_kwh,"
            "soc_kwh,regime,clipped,utility\n";
      csv.reserve(rep.horizon * 96);
      for (std::size_t t = 0; t < rep.horizon; ++t) {
        csv += std::to_string(t) + "," +
               (t < sc.traces.timestamps.size() ? sc.traces.timestamps[t] : "") + "," +
               num(sc.traces.generation[t]) + "," + num(sc.traces.baseline[t]) + "," +
               num(rep.consumption[t]) + "," + num(rep.storage[t]) + "," +
               num(rep.net[t]) + "," + num(rep.soc[t + 1]) + "," +
               std::to_string(rep.regime[t]) + "," + std::to_string(rep.clipped[t]) + "," +
               num(rep.utility[t]) + "\n";
      }
    }
    *report = duplicate(dump(j));
    if (intervals) *intervals = duplicate(csv);
  });
}

nemx_status nemx_compare_csv(const nemx_scenario* scenario, char** out) {
  return guarded([&] {
    require(scenario, "scenario");
    require(out, "out");
    auto table = nemx::compare_customers(scenario->config.scenario(), scenario->config.compare);
    *out = duplicate(table.to_csv());
  });
}

nemx_status nemx_sweep_csv(const nemx_scenario* scenario, char** out) {
  return guarded([&] {
    require(scenario, "scenario");
    require(out, "out");
    const auto& cfg = scenario->config;
    if (!cfg.sweep) nemx::fail(nemx::ErrorCode::kConfig, "config has no sweep block");
    auto table = nemx::value_of_storage_sweep(cfg.scenario(), cfg.sweep->parameter,
                                              cfg.sweep->grid);
    *out = duplicate(table.to_csv());
  });
}

nemx_status nemx_traces_csv(const nemx_scenario* scenario, char** out) {
  return guarded([&] {
    require(scenario, "scenario");
    require(out, "out");
    if (!scenario->config.traces)
      nemx::fail(nemx::ErrorCode::kConfig, "config has no traces");
    *out = duplicate(nemx::traces_to_csv(*scenario->config.traces));
  });
}

double nemx_payment(double buy, double export_rate, double fixed, double z) {
  return nemx::payment({buy, export_rate, fixed}, z);
}

nemx_status nemx_soc_step(double soc, double e, double charge_limit, double discharge_limit,
                          double charge_eff, double discharge_eff, double* out) {
  return guarded([&] {
    require(out, "out");
    auto battery = nemx::Battery::make(charge_limit, discharge_limit, charge_eff,
                                       discharge_eff, -1e300, 1e300, soc, 0.0);
    *out = battery.soc_step(soc, e);
  });
}

}  // extern "C"
