#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace nemx {

using nlohmann::json;

namespace {

std::string join_violations(const std::vector<std::string>& violations) {
  std::string out = "invalid configuration";
  for (const auto& v : violations) out += "\n  " + v;
  return out;
}

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string item(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

class Reader {
 public:
  std::vector<std::string> violations;

  void add(const std::string& path, const std::string& message) {
    violations.push_back((path.empty() ? std::string("<root>") : path) + ": " + message);
  }

  bool object(const json& node, const std::string& path) {
    if (node.is_object()) return true;
    add(path, "must be an object");
    return false;
  }

  void allow(const json& node, const std::string& path,
             std::initializer_list<const char*> keys) {
    std::set<std::string> known(keys.begin(), keys.end());
    for (const auto& [key, value] : node.items())
      if (!known.count(key)) add(child(path, key), "unknown field");
  }

  std::optional<double> number(const json& node, const std::string& key,
                               const std::string& path, bool required) {
    auto it = node.find(key);
    if (it == node.end()) {
      if (required) add(child(path, key), "missing field");
      return std::nullopt;
    }
    if (!it->is_number() || !std::isfinite(it->get<double>())) {
      add(child(path, key), "must be a finite number");
      return std::nullopt;
    }
    return it->get<double>();
  }

  double number_or(const json& node, const std::string& key, const std::string& path,
                   double fallback) {
    return number(node, key, path, false).value_or(fallback);
  }

  std::optional<std::size_t> count(const json& node, const std::string& key,
                                   const std::string& path, bool required) {
    auto it = node.find(key);
    if (it == node.end()) {
      if (required) add(child(path, key), "missing field");
      return std::nullopt;
    }
    if (!it->is_number_integer() || it->get<long long>() < 0) {
      add(child(path, key), "must be a nonnegative integer");
      return std::nullopt;
    }
    return static_cast<std::size_t>(it->get<long long>());
  }

  std::optional<std::string> text(const json& node, const std::string& key,
                                  const std::string& path, bool required) {
    auto it = node.find(key);
    if (it == node.end()) {
      if (required) add(child(path, key), "missing field");
      return std::nullopt;
    }
    if (!it->is_string()) {
      add(child(path, key), "must be a string");
      return std::nullopt;
    }
    return it->get<std::string>();
  }

  std::optional<std::vector<double>> numbers(const json& node, const std::string& key,
                                             const std::string& path) {
    auto it = node.find(key);
    if (it == node.end()) return std::nullopt;
    if (!it->is_array()) {
      add(child(path, key), "must be an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& v = (*it)[i];
      if (!v.is_number() || !std::isfinite(v.get<double>())) {
        add(item(child(path, key), i), "must be a finite number");
        return std::nullopt;
      }
      out.push_back(v.get<double>());
    }
    return out;
  }

  // Runs a throwing constructor, turning library errors into violations.
  template <typename Fn>
  auto guard(const std::string& path, Fn fn) -> std::optional<decltype(fn())> {
    try {
      return fn();
    } catch (const Error& err) {
      add(path, err.what());
      return std::nullopt;
    }
  }
};

std::optional<Traces> parse_traces(Reader& r, const json& node, const std::string& path,
                                   const std::string& base_dir, double interval_minutes,
                                   std::uint64_t seed) {
  if (!r.object(node, path)) return std::nullopt;
  r.allow(node, path, {"csv", "synthetic", "generation", "baseline"});
  const int forms = static_cast<int>(node.contains("csv")) +
                    static_cast<int>(node.contains("synthetic")) +
                    static_cast<int>(node.contains("generation") || node.contains("baseline"));
  if (forms != 1) {
    r.add(path, "give exactly one of csv, synthetic, or generation+baseline");
    return std::nullopt;
  }
  if (auto file = r.text(node, "csv", path, false)) {
    std::filesystem::path p(*file);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    return r.guard(child(path, "csv"), [&] { return read_traces_csv(p.string()); });
  }
  if (node.contains("synthetic")) {
    const std::string sp = child(path, "synthetic");
    const json& s = node["synthetic"];
    if (!r.object(s, sp)) return std::nullopt;
    r.allow(s, sp, {"days", "start_date", "pv_kw", "cloudiness", "base_kw", "morning_kw",
                    "evening_kw", "noise", "seed"});
    SyntheticTraceSpec spec;
    spec.interval_minutes = interval_minutes;
    spec.seed = seed;
    if (auto v = r.count(s, "days", sp, false)) spec.days = *v;
    if (auto v = r.text(s, "start_date", sp, false)) spec.start_date = *v;
    spec.pv_kw = r.number_or(s, "pv_kw", sp, spec.pv_kw);
    spec.cloudiness = r.number_or(s, "cloudiness", sp, spec.cloudiness);
    spec.base_kw = r.number_or(s, "base_kw", sp, spec.base_kw);
    spec.morning_kw = r.number_or(s, "morning_kw", sp, spec.morning_kw);
    spec.evening_kw = r.number_or(s, "evening_kw", sp, spec.evening_kw);
    spec.noise = r.number_or(s, "noise", sp, spec.noise);
    for (auto [key, v] : {std::pair{"pv_kw", spec.pv_kw}, {"base_kw", spec.base_kw},
                          {"morning_kw", spec.morning_kw}, {"evening_kw", spec.evening_kw},
                          {"noise", spec.noise}})
      if (v < 0.0) r.add(child(sp, key), "must be nonnegative");
    if (spec.cloudiness < 0.0 || spec.cloudiness > 1.0)
      r.add(child(sp, "cloudiness"), "must lie in [0,1]");
    if (s.contains("seed")) r.add(child(sp, "seed"), "use the top-level seed");
    return r.guard(sp, [&] { return synthesize_traces(spec); });
  }
  auto gen = r.numbers(node, "generation", path);
  auto base = r.numbers(node, "baseline", path);
  if (!gen || !base) {
    if (!node.contains("generation")) r.add(child(path, "generation"), "missing field");
    if (!node.contains("baseline")) r.add(child(path, "baseline"), "missing field");
    return std::nullopt;
  }
  if (gen->size() != base->size() || gen->empty()) {
    r.add(path, "generation and baseline must be nonempty and of equal length");
    return std::nullopt;
  }
  for (std::size_t t = 0; t < gen->size(); ++t) {
    if ((*gen)[t] < 0.0) r.add(item(child(path, "generation"), t), "must be nonnegative");
    if ((*base)[t] < 0.0) r.add(item(child(path, "baseline"), t), "must be nonnegative");
  }
  Traces traces;
  traces.generation = std::move(*gen);
  traces.baseline = std::move(*base);
  for (std::size_t t = 0; t < traces.size(); ++t)
    traces.timestamps.push_back(iso_timestamp(
        "2016-06-01", static_cast<long long>(std::llround(t * interval_minutes))));
  return traces;
}

std::optional<TariffSchedule> parse_tariff(Reader& r, const json& node,
                                           const std::string& path, double interval_minutes,
                                           std::size_t horizon, int start_minute) {
  if (!r.object(node, path)) return std::nullopt;
  r.allow(node, path, {"buy", "export", "windows", "fixed_charge_daily",
                       "fixed_charge_monthly", "netting_intervals", "export_trace",
                       "export_hourly_profile"});
  const double hours = interval_minutes / 60.0;
  const std::size_t netting = r.count(node, "netting_intervals", path, false).value_or(1);
  if (netting == 0) r.add(child(path, "netting_intervals"), "must be positive");

  double daily_fixed = 0.0;
  auto daily = r.number(node, "fixed_charge_daily", path, false);
  auto monthly = r.number(node, "fixed_charge_monthly", path, false);
  if (daily && monthly)
    r.add(path, "give at most one of fixed_charge_daily and fixed_charge_monthly");
  if (daily) daily_fixed = *daily;
  if (monthly) daily_fixed = *monthly / 30.0;
  if (daily_fixed < 0.0) r.add(path, "fixed charge must be nonnegative");
  const double window_fixed = daily_fixed * static_cast<double>(netting) * hours / 24.0;

  std::vector<RateWindow> windows;
  if (node.contains("windows")) {
    if (node.contains("buy") || node.contains("export"))
      r.add(path, "give either flat buy/export rates or windows, not both");
    const std::string wp = child(path, "windows");
    const json& list = node["windows"];
    if (!list.is_array() || list.empty()) {
      r.add(wp, "must be a nonempty array");
      return std::nullopt;
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string ip = item(wp, i);
      const json& w = list[i];
      if (!r.object(w, ip)) continue;
      r.allow(w, ip, {"start", "end", "buy", "export"});
      auto start = r.text(w, "start", ip, true);
      auto end = r.text(w, "end", ip, true);
      auto buy = r.number(w, "buy", ip, true);
      auto exp = r.number(w, "export", ip, true);
      auto s = start ? r.guard(child(ip, "start"), [&] { return parse_clock(*start); })
                     : std::nullopt;
      auto e = end ? r.guard(child(ip, "end"), [&] { return parse_clock(*end); })
                   : std::nullopt;
      if (!s || !e || !buy || !exp) continue;
      auto rate = r.guard(ip, [&] { return NemRate::make(*buy, *exp, window_fixed); });
      if (rate) windows.push_back({*s, *e, *rate});
    }
  } else {
    auto buy = r.number(node, "buy", path, true);
    auto exp = r.number(node, "export", path, !node.contains("export_trace") &&
                                               !node.contains("export_hourly_profile"));
    if (!buy) return std::nullopt;
    auto rate = r.guard(path, [&] { return NemRate::make(*buy, exp.value_or(0.0), window_fixed); });
    if (!rate) return std::nullopt;
    windows.push_back({0, 0, *rate});
  }

  std::vector<double> export_trace;
  if (node.contains("export_trace") && node.contains("export_hourly_profile"))
    r.add(path, "give at most one of export_trace and export_hourly_profile");
  if (auto trace = r.numbers(node, "export_trace", path)) export_trace = std::move(*trace);
  if (auto profile = r.numbers(node, "export_hourly_profile", path)) {
    if (profile->size() != 24) {
      r.add(child(path, "export_hourly_profile"), "must have 24 hourly values");
    } else {
      export_trace.resize(horizon);
      for (std::size_t t = 0; t < horizon; ++t) {
        double minute = start_minute + static_cast<double>(t) * interval_minutes;
        auto hour = static_cast<std::size_t>(std::fmod(std::floor(minute / 60.0 + 1e-9), 24.0));
        export_trace[t] = (*profile)[hour];
      }
    }
  }
  if (!r.violations.empty() || windows.empty()) return std::nullopt;
  return r.guard(path, [&] {
    return TariffSchedule(windows, hours, netting, horizon, start_minute, export_trace);
  });
}

void parse_battery(Reader& r, const json& node, const std::string& path,
                   double interval_hours, const std::optional<TariffSchedule>& tariff,
                   ScenarioConfig& cfg) {
  if (!r.object(node, path)) return;
  r.allow(node, path, {"charge_kw", "discharge_kw", "charge_eff", "discharge_eff",
                       "soc_min_kwh", "soc_max_kwh", "initial_soc_kwh", "salvage"});
  auto charge = r.number(node, "charge_kw", path, true);
  auto discharge = r.number(node, "discharge_kw", path, true);
  auto tau = r.number(node, "charge_eff", path, true);
  auto rho = r.number(node, "discharge_eff", path, true);
  double soc_min = r.number_or(node, "soc_min_kwh", path, 0.0);
  auto soc_max = r.number(node, "soc_max_kwh", path, true);
  std::optional<double> initial = r.number(node, "initial_soc_kwh", path, false);
  if (tau && !(*tau > 0.0 && *tau <= 1.0))
    r.add(child(path, "charge_eff"), "charge_eff must lie in (0,1]");
  if (rho && !(*rho > 0.0 && *rho <= 1.0))
    r.add(child(path, "discharge_eff"), "discharge_eff must lie in (0,1]");
  if (charge && *charge < 0.0) r.add(child(path, "charge_kw"), "must be nonnegative");
  if (discharge && *discharge < 0.0) r.add(child(path, "discharge_kw"), "must be nonnegative");

  double salvage = 0.0;
  auto it = node.find("salvage");
  if (it == node.end()) {
    r.add(child(path, "salvage"), "missing field (a rate in $/kWh or \"auto\")");
  } else if (it->is_string() && it->get<std::string>() == "auto") {
    cfg.auto_salvage = true;
  } else if (it->is_number()) {
    salvage = it->get<double>();
  } else {
    r.add(child(path, "salvage"), "must be a number or \"auto\"");
  }
  if (!charge || !discharge || !tau || !rho || !soc_max || !r.violations.empty()) return;
  if (cfg.auto_salvage) {
    if (!tariff) return;
    std::vector<NemRate> rates = tariff->rates();
    salvage = sandwich_midpoint_salvage(*tau, *rho, rates);
    if (salvage < 0.0) {
      r.add(child(path, "salvage"),
            "no salvage rate satisfies the sandwich for these rates and efficiencies");
      return;
    }
  }
  auto battery = r.guard(path, [&] {
    return Battery::make(*charge * interval_hours, *discharge * interval_hours, *tau, *rho,
                         soc_min, *soc_max, initial.value_or(soc_min), salvage);
  });
  if (battery) {
    cfg.battery = *battery;
    cfg.has_battery = true;
  }
}

void parse_devices(Reader& r, const json& list, const std::string& path,
                   const std::optional<TariffSchedule>& tariff,
                   const std::optional<Traces>& traces, ScenarioConfig& cfg) {
  if (!list.is_array() || list.empty()) {
    r.add(path, "must be a nonempty array");
    return;
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string ip = item(path, i);
    const json& node = list[i];
    if (!r.object(node, ip)) continue;
    r.allow(node, ip, {"id", "d_min", "d_max", "alpha", "beta", "baseline_kwh",
                       "baseline_price", "baseline_share", "elasticity"});
    std::string id = r.text(node, "id", ip, false).value_or("device" + std::to_string(i));
    if (!ids.insert(id).second) r.add(child(ip, "id"), "duplicate device id '" + id + "'");
    double d_min = r.number_or(node, "d_min", ip, 0.0);
    auto d_max = r.number(node, "d_max", ip, false);

    const bool direct = node.contains("alpha") || node.contains("beta");
    const bool point = node.contains("baseline_kwh");
    const bool share = node.contains("baseline_share");
    if (static_cast<int>(direct) + static_cast<int>(point) + static_cast<int>(share) != 1) {
      r.add(ip, "give exactly one utility form: alpha+beta, baseline_kwh+baseline_price+"
                "elasticity, or baseline_share+elasticity");
      continue;
    }
    if (direct) {
      auto alpha = r.number(node, "alpha", ip, true);
      auto beta = r.number(node, "beta", ip, true);
      if (alpha && !(*alpha > 0.0)) r.add(child(ip, "alpha"), "must be positive");
      if (beta && !(*beta > 0.0)) r.add(child(ip, "beta"), "must be positive");
      if (!d_max) r.add(child(ip, "d_max"), "missing field");
      if (!alpha || !beta || !d_max || !(*alpha > 0.0) || !(*beta > 0.0)) continue;
      auto dev = r.guard(ip, [&] {
        return Device(id, d_min, *d_max, UtilityFn::quadratic(*alpha, *beta));
      });
      if (dev) cfg.devices.push_back(std::move(*dev));
    } else if (point) {
      auto kwh = r.number(node, "baseline_kwh", ip, true);
      auto price = r.number(node, "baseline_price", ip, true);
      auto eps = r.number(node, "elasticity", ip, true);
      if (!d_max) r.add(child(ip, "d_max"), "missing field");
      if (!kwh || !price || !eps || !d_max) continue;
      auto q = r.guard(ip, [&] { return calibrate_quadratic(*kwh, *price, *eps); });
      if (!q) continue;
      auto dev = r.guard(ip, [&] {
        return Device(id, d_min, *d_max, UtilityFn::quadratic(q->alpha, q->beta));
      });
      if (dev) cfg.devices.push_back(std::move(*dev));
    } else {
      auto fraction = r.number(node, "baseline_share", ip, true);
      auto eps = r.number(node, "elasticity", ip, true);
      if (fraction && !(*fraction > 0.0 && *fraction <= 1.0))
        r.add(child(ip, "baseline_share"), "must lie in (0,1]");
      if (eps && !(*eps < 0.0)) r.add(child(ip, "elasticity"), "must be negative");
      if (!traces) r.add(ip, "baseline_share devices need traces");
      if (!fraction || !eps || !traces || !tariff || !r.violations.empty()) continue;
      // Per-interval calibration at the buy rate in force, so the device's
      // price-only response reproduces its share of the baseline.
      const std::size_t horizon = traces->size();
      double reference = 0.0;
      std::size_t positive = 0;
      for (double b : traces->baseline)
        if (b > 0.0) {
          reference += b * *fraction;
          ++positive;
        }
      reference = positive > 0 ? reference / static_cast<double>(positive) : 1.0;
      std::vector<UtilityFn> profile;
      profile.reserve(horizon);
      double saturation = 0.0;
      bool ok = true;
      for (std::size_t t = 0; t < horizon && ok; ++t) {
        const double price = tariff->rate_at(t).buy;
        const double target = traces->baseline[t] * *fraction;
        auto q = r.guard(ip, [&] {
          if (target > 0.0) return calibrate_quadratic(target, price, *eps);
          // Zero baseline: activation exactly at the buy rate, slope from the
          // mean positive baseline.
          QuadraticUtility ref = calibrate_quadratic(reference, price, *eps);
          return QuadraticUtility{price, ref.beta};
        });
        if (!q) {
          ok = false;
          break;
        }
        saturation = std::max(saturation, q->alpha / q->beta);
        profile.push_back(UtilityFn::quadratic(q->alpha, q->beta));
      }
      if (!ok) continue;
      UtilityFn first = profile.front();
      auto dev = r.guard(ip, [&] {
        return Device(id, d_min, d_max.value_or(saturation), first, std::move(profile));
      });
      if (dev) cfg.devices.push_back(std::move(*dev));
    }
  }
}

std::vector<std::size_t> counts_of(Reader& r, const json& node, const std::string& key,
                                   const std::string& path) {
  std::vector<std::size_t> out;
  auto it = node.find(key);
  if (it == node.end()) return out;
  if (!it->is_array()) {
    r.add(child(path, key), "must be an array of positive integers");
    return out;
  }
  for (std::size_t i = 0; i < it->size(); ++i) {
    const json& v = (*it)[i];
    if (!v.is_number_integer() || v.get<long long>() <= 0)
      r.add(item(child(path, key), i), "must be a positive integer");
    else
      out.push_back(static_cast<std::size_t>(v.get<long long>()));
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error(ErrorCode::kConfig, join_violations(violations)),
      violations_(std::move(violations)) {}

StageConfig ScenarioConfig::stage(std::optional<std::size_t> t) const {
  const std::size_t at = t.value_or(analysis_t);
  if (!tariff) fail(ErrorCode::kConfig, "configuration has no tariff");
  return {devices, tariff->rate_at(at), has_battery ? battery : Battery::none(), at};
}

Scenario ScenarioConfig::scenario() const {
  if (!traces) fail(ErrorCode::kConfig, "simulation needs traces");
  if (!tariff) fail(ErrorCode::kConfig, "configuration has no tariff");
  return {*traces, *tariff, devices, has_battery ? battery : Battery::none(), type,
          auto_salvage};
}

ScenarioConfig parse_config_text(const std::string& text, const std::string& base_dir,
                                 std::optional<std::uint64_t> seed_override) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ConfigError({std::string("<root>: malformed JSON: ") + err.what()});
  }
  Reader r;
  ScenarioConfig cfg;
  if (!r.object(root, "")) throw ConfigError(r.violations);
  r.allow(root, "", {"$schema", "description", "interval_minutes", "start_time", "horizon",
                     "seed", "customer_type", "devices", "battery", "tariff", "traces",
                     "analysis", "verify", "compare", "sweep"});

  cfg.interval_minutes = r.number_or(root, "interval_minutes", "", 60.0);
  if (!(cfg.interval_minutes > 0.0) || std::fmod(1440.0, cfg.interval_minutes) != 0.0) {
    r.add("interval_minutes", "must be positive and divide 1440");
    throw ConfigError(r.violations);
  }
  int start_minute = 0;
  if (auto s = r.text(root, "start_time", "", false))
    start_minute = r.guard("start_time", [&] { return parse_clock(*s); }).value_or(0) % 1440;
  if (auto seed = r.count(root, "seed", "", false)) cfg.seed = *seed;
  if (seed_override) cfg.seed = *seed_override;

  if (root.contains("traces"))
    cfg.traces = parse_traces(r, root["traces"], "traces", base_dir, cfg.interval_minutes,
                              cfg.seed);
  auto per_day = static_cast<std::size_t>(std::llround(1440.0 / cfg.interval_minutes));
  std::size_t horizon = cfg.traces ? cfg.traces->size() : per_day;
  if (auto h = r.count(root, "horizon", "", false)) {
    if (cfg.traces && *h != cfg.traces->size())
      r.add("horizon", "differs from the trace length " + std::to_string(cfg.traces->size()));
    else if (*h == 0)
      r.add("horizon", "must be positive");
    else
      horizon = *h;
  }

  if (!root.contains("tariff"))
    r.add("tariff", "missing field");
  else
    cfg.tariff = parse_tariff(r, root["tariff"], "tariff", cfg.interval_minutes, horizon,
                              start_minute);
  if (root.contains("battery") && !root["battery"].is_null())
    parse_battery(r, root["battery"], "battery", cfg.interval_hours(), cfg.tariff, cfg);
  if (!root.contains("devices"))
    r.add("devices", "missing field");
  else
    parse_devices(r, root["devices"], "devices", cfg.tariff, cfg.traces, cfg);

  if (auto name = r.text(root, "customer_type", "", false)) {
    if (auto type = parse_type(*name))
      cfg.type = *type;
    else
      r.add("customer_type", "unknown customer type '" + *name +
                                 "' (consumer, passive_dg, active_dg, passive_sdg, active_sdg)");
  }

  if (root.contains("analysis")) {
    const json& a = root["analysis"];
    if (r.object(a, "analysis")) {
      r.allow(a, "analysis", {"t", "g"});
      cfg.analysis_t = r.count(a, "t", "analysis", false).value_or(0);
      if (cfg.analysis_t >= horizon) r.add("analysis.t", "must lie inside the horizon");
      if (a.contains("g")) {
        if (a["g"].is_number()) {
          cfg.analysis_g = {a["g"].get<double>()};
        } else if (auto gs = r.numbers(a, "g", "analysis")) {
          cfg.analysis_g = *gs;
        }
        for (double g : cfg.analysis_g)
          if (g < 0.0) r.add("analysis.g", "generation must be nonnegative");
      }
    }
  }
  if (root.contains("verify")) {
    const json& v = root["verify"];
    if (r.object(v, "verify")) {
      r.allow(v, "verify", {"samples", "resolution"});
      cfg.verify.samples = r.count(v, "samples", "verify", false).value_or(cfg.verify.samples);
      cfg.verify.resolution = r.number_or(v, "resolution", "verify", cfg.verify.resolution);
      if (!(cfg.verify.resolution > 0.0)) r.add("verify.resolution", "must be positive");
    }
  }
  if (root.contains("compare")) {
    const json& c = root["compare"];
    if (r.object(c, "compare")) {
      r.allow(c, "compare", {"netting_intervals", "storage_kw"});
      if (c.contains("netting_intervals"))
        cfg.compare.netting = counts_of(r, c, "netting_intervals", "compare");
      if (auto kw = r.numbers(c, "storage_kw", "compare")) {
        cfg.compare.storage_kw = *kw;
        for (double v : *kw)
          if (v < 0.0) r.add("compare.storage_kw", "ratings must be nonnegative");
      }
    }
  }
  if (root.contains("sweep")) {
    const json& s = root["sweep"];
    if (r.object(s, "sweep")) {
      r.allow(s, "sweep", {"parameter", "grid"});
      SweepSettings sweep;
      auto name = r.text(s, "parameter", "sweep", true);
      if (name && *name == "export_rate")
        sweep.parameter = SweepParameter::kExportRate;
      else if (name && *name == "efficiency")
        sweep.parameter = SweepParameter::kEfficiency;
      else if (name)
        r.add("sweep.parameter", "must be export_rate or efficiency");
      auto grid = r.numbers(s, "grid", "sweep");
      if (!grid || grid->empty())
        r.add("sweep.grid", "must be a nonempty array of numbers");
      else
        sweep.grid = *grid;
      cfg.sweep = sweep;
    }
  }

  if (!r.violations.empty()) throw ConfigError(r.violations);
  return cfg;
}

ScenarioConfig parse_config(const std::string& path,
                            std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot read config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string dir = std::filesystem::path(path).parent_path().string();
  return parse_config_text(buffer.str(), dir.empty() ? "." : dir, seed_override);
}

}  // namespace nemx
