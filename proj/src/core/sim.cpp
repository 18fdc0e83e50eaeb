#include "sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "analysis.hpp"
#include "error.hpp"

namespace nemx {

namespace {

// Runs body(i) for i in [0, n) on a small thread pool. The first exception
// thrown by any task is rethrown after all workers join.
template <typename Body>
void parallel_for(std::size_t n, Body body) {
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

bool has_storage(ProsumerType type) {
  return type == ProsumerType::kActiveSdg || type == ProsumerType::kPassiveSdg;
}

double demand_for(DeviceSpan devices, double baseline, std::size_t t) {
  double lo = 0.0;
  for (const Device& dev : devices) lo += dev.d_min();
  double hi = aggregate_response(devices, 0.0, t);
  return std::clamp(baseline, lo, hi);
}

struct SimInputs {
  const Traces& traces;
  const TariffSchedule& tariff;
  DeviceSpan devices;
  const Battery& battery;
  ProsumerType type;
};

// Decisions, SoC path and utility; billing is left to settle().
SimReport simulate_decisions(const SimInputs& in, const SimOptions& options) {
  const std::size_t horizon = in.tariff.horizon();
  const std::size_t k = in.devices.size();
  const bool storage = has_storage(in.type);
  const Battery battery = storage ? in.battery : Battery::none();
  const std::vector<NemRate> rates = in.tariff.rates();

  SimReport report;
  report.type = in.type;
  report.horizon = horizon;
  report.devices = k;
  report.days = static_cast<double>(horizon) * in.tariff.interval_hours() / 24.0;
  report.net.resize(horizon);
  if (options.record_intervals) {
    report.device_d.resize(horizon * k);
    report.consumption.resize(horizon);
    report.storage.resize(horizon);
    report.utility.resize(horizon);
    report.soc.resize(horizon + 1);
    report.regime.assign(horizon, -1);
    report.clipped.assign(horizon, 0);
  }
  if (storage) {
    SandwichReport sw = check_salvage_sandwich(battery, rates);
    report.sandwich_ok = sw.pass;
    if (!sw.pass)
      report.warnings.push_back(
          "salvage sandwich fails in " + std::to_string(sw.violations.size()) +
          " intervals; the storage policy is applied without its ordering guarantee");
  }

  double soc = in.battery.initial_soc;
  if (options.record_intervals) report.soc[0] = soc;
  for (std::size_t t = 0; t < horizon; ++t) {
    const NemRate rate = rates[t].without_fixed();
    // The consumer has no on-site generation.
    const double g =
        in.type == ProsumerType::kConsumer ? 0.0 : in.traces.generation[t];
    std::vector<double> d;
    double e = 0.0;
    int regime = -1;
    bool clipped = false;

    switch (in.type) {
      case ProsumerType::kConsumer:
      case ProsumerType::kPassiveDg:
      case ProsumerType::kPassiveSdg: {
        double demand = demand_for(in.devices, in.traces.baseline[t], t);
        d = allocate(in.devices, demand, t);
        if (in.type == ProsumerType::kPassiveSdg)
          e = std::clamp(g - demand, -battery.discharge_limit, battery.charge_limit);
        break;
      }
      case ProsumerType::kActiveDg:
        d = consume_given_storage(g, 0.0, in.devices, rate, t).d;
        break;
      case ProsumerType::kActiveSdg: {
        Thresholds th = compute_thresholds(in.devices, rate, battery, t);
        Decision dec = decide(g, in.devices, rate, battery, t, th);
        d = std::move(dec.d);
        e = dec.e;
        regime = dec.regime ? static_cast<int>(*dec.regime) : -1;
        break;
      }
    }

    if (storage) {
      ActionInterval feasible = feasible_action_interval(soc, battery);
      double kept = std::clamp(e, feasible.lo, feasible.hi);
      if (kept != e) {
        clipped = std::abs(kept - e) > 1e-12;
        e = kept;
        if (clipped && in.type == ProsumerType::kActiveSdg)
          d = consume_given_storage(g, e, in.devices, rate, t).d;
      }
      soc = std::clamp(battery.soc_step(soc, e), battery.soc_min, battery.soc_max);
      if (clipped) ++report.clip_events;
    }

    const double consumed = std::accumulate(d.begin(), d.end(), 0.0);
    const double u = total_utility(in.devices, d, t);
    report.net[t] = consumed + e - g;
    report.totals.utility += u;
    report.totals.generation += g;
    if (options.record_intervals) {
      std::copy(d.begin(), d.end(), report.device_d.begin() + static_cast<std::ptrdiff_t>(t * k));
      report.consumption[t] = consumed;
      report.storage[t] = e;
      report.utility[t] = u;
      report.soc[t + 1] = soc;
      report.regime[t] = regime;
      report.clipped[t] = clipped ? 1 : 0;
    }
  }
  report.totals.salvage = storage ? battery.salvage * (soc - in.battery.initial_soc) : 0.0;
  return report;
}

// Billing and metrics for a decision trace under a (possibly different)
// netting window.
void settle(SimReport& report, const TariffSchedule& tariff,
            const Traces& traces) {
  report.bills = bill_trace(tariff, report.net);
  report.straddling_windows = straddling_windows(tariff, report.horizon);
  const std::size_t window = tariff.netting_intervals();
  std::vector<double> z_windows;
  std::vector<double> g_windows;
  z_windows.reserve(report.bills.size());
  g_windows.reserve(report.bills.size());
  double imports = 0.0;
  double exports = 0.0;
  for (std::size_t start = 0; start < report.horizon; start += window) {
    double z = 0.0;
    double g = 0.0;
    for (std::size_t i = start; i < start + window; ++i) {
      z += report.net[i];
      if (report.type != ProsumerType::kConsumer) g += traces.generation[i];
    }
    imports += positive_part(z);
    exports += negative_part(z);
    z_windows.push_back(z);
    g_windows.push_back(g);
  }
  report.totals.imports = imports;
  report.totals.exports = exports;
  report.totals.payment = std::accumulate(report.bills.begin(), report.bills.end(), 0.0);
  report.totals.surplus =
      report.totals.utility - report.totals.payment + report.totals.salvage;
  report.daily_surplus = report.totals.surplus / report.days;
  try {
    report.self_consumption = self_consumption(z_windows, g_windows);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::kUndefinedRatio) throw;
    report.self_consumption.reset();
  }
}

std::optional<double> gain_or_empty(double candidate, double benchmark) {
  try {
    return surplus_gain(candidate, benchmark);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::kGainUndefined) throw;
    return std::nullopt;
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

}  // namespace

void validate_scenario(const Scenario& s) {
  const std::size_t horizon = s.tariff.horizon();
  if (s.traces.generation.size() != horizon || s.traces.baseline.size() != horizon)
    fail(ErrorCode::kConfig, "trace length " + std::to_string(s.traces.generation.size()) +
                                 " does not match the tariff horizon " +
                                 std::to_string(horizon));
  if (s.devices.empty()) fail(ErrorCode::kConfig, "scenario needs at least one device");
  if (horizon % s.tariff.netting_intervals() != 0)
    fail(ErrorCode::kConfig, "horizon is not a whole number of netting windows");
  for (std::size_t t = 0; t < horizon; ++t) {
    double g = s.traces.generation[t];
    double b = s.traces.baseline[t];
    if (!std::isfinite(g) || !std::isfinite(b) || g < 0.0 || b < 0.0)
      fail(ErrorCode::kConfig, "interval " + std::to_string(t) +
                                   ": generation and baseline must be finite and nonnegative");
  }
}

double passive_demand(const Scenario& scenario, std::size_t t) {
  return demand_for(scenario.devices, scenario.traces.baseline.at(t), t);
}

Battery with_power_rating(const Battery& battery, double kw, double interval_hours) {
  if (!(kw >= 0.0)) fail(ErrorCode::kConfig, "storage rating must be nonnegative");
  Battery out = battery;
  out.charge_limit = kw * interval_hours;
  out.discharge_limit = kw * interval_hours;
  return out;
}

SimReport run(const Scenario& scenario, const SimOptions& options) {
  validate_scenario(scenario);
  SimReport report = simulate_decisions(
      {scenario.traces, scenario.tariff, scenario.devices, scenario.battery, scenario.type},
      options);
  settle(report, scenario.tariff, scenario.traces);
  return report;
}

const ComparisonRow* ComparisonTable::find(std::size_t netting, double storage_kw,
                                           ProsumerType type) const {
  for (const auto& row : rows)
    if (row.netting_intervals == netting && row.storage_kw == storage_kw &&
        row.type == type)
      return &row;
  return nullptr;
}

std::string ComparisonTable::to_csv() const {
  std::string out =
      "netting_intervals,storage_kw,type,daily_surplus,gain_pct,self_consumption,clip_events\n";
  for (const auto& row : rows) {
    out += std::to_string(row.netting_intervals) + "," + fmt(row.storage_kw) + "," +
           std::string(type_name(row.type)) + "," + fmt(row.daily_surplus) + "," +
           fmt(row.gain_pct) + "," + fmt(row.self_consumption) + "," +
           std::to_string(row.clip_events) + "\n";
  }
  return out;
}

ComparisonTable compare_customers(const Scenario& base, const CompareOptions& options) {
  validate_scenario(base);
  if (options.netting.empty() || options.storage_kw.empty())
    fail(ErrorCode::kConfig, "comparison needs netting windows and storage ratings");
  const double hours = base.tariff.interval_hours();
  std::vector<TariffSchedule> tariffs;
  for (std::size_t n : options.netting) tariffs.push_back(base.tariff.with_netting(n));
  for (const auto& tariff : tariffs)
    if (base.tariff.horizon() % tariff.netting_intervals() != 0)
      fail(ErrorCode::kConfig, "horizon is not a whole number of netting windows");

  // Decisions do not depend on the netting window, only billing does.
  struct Job {
    ProsumerType type;
    std::optional<std::size_t> rating;  // index into storage_kw
  };
  std::vector<Job> jobs{{ProsumerType::kConsumer, {}},
                        {ProsumerType::kPassiveDg, {}},
                        {ProsumerType::kActiveDg, {}}};
  for (std::size_t r = 0; r < options.storage_kw.size(); ++r) {
    jobs.push_back({ProsumerType::kPassiveSdg, r});
    jobs.push_back({ProsumerType::kActiveSdg, r});
  }
  std::vector<Battery> batteries;
  for (double kw : options.storage_kw)
    batteries.push_back(with_power_rating(base.battery, kw, hours));

  std::vector<SimReport> reports(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const Battery& battery = jobs[i].rating ? batteries[*jobs[i].rating] : base.battery;
    reports[i] = simulate_decisions(
        {base.traces, base.tariff, base.devices, battery, jobs[i].type},
        SimOptions{false});
  });

  ComparisonTable table;
  for (const auto& tariff : tariffs) {
    std::vector<SimReport> settled = reports;
    for (auto& rep : settled) settle(rep, tariff, base.traces);
    const double benchmark = settled[0].daily_surplus;
    for (std::size_t r = 0; r < options.storage_kw.size(); ++r) {
      for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (jobs[i].rating && *jobs[i].rating != r) continue;
        const SimReport& rep = settled[i];
        ComparisonRow row;
        row.netting_intervals = tariff.netting_intervals();
        row.storage_kw = options.storage_kw[r];
        row.type = jobs[i].type;
        row.daily_surplus = rep.daily_surplus;
        row.gain_pct = gain_or_empty(rep.daily_surplus, benchmark);
        row.self_consumption = rep.self_consumption;
        row.clip_events = rep.clip_events;
        table.rows.push_back(row);
      }
    }
  }
  return table;
}

std::string_view sweep_parameter_name(SweepParameter p) {
  return p == SweepParameter::kExportRate ? "export_rate" : "efficiency";
}

std::string SweepTable::to_csv() const {
  std::string out = std::string(sweep_parameter_name(parameter)) + ",skipped,reason,salvage";
  for (const auto& [sdg, dg] : kPairings) {
    std::string tag = std::string(type_name(sdg)) + "_vs_" + std::string(type_name(dg));
    out += ",vos_daily_" + tag + ",vos_pct_" + tag;
  }
  out += "\n";
  for (const auto& row : rows) {
    out += fmt(row.value) + "," + (row.skipped ? "1" : "0") + "," + row.reason + "," +
           (row.skipped ? "" : fmt(row.salvage));
    for (std::size_t p = 0; p < kPairings.size(); ++p)
      out += "," + (row.skipped ? std::string() : fmt(row.vos_daily[p])) + "," +
             fmt(row.vos_pct[p]);
    out += "\n";
  }
  return out;
}

SweepTable value_of_storage_sweep(const Scenario& base, SweepParameter parameter,
                                  const std::vector<double>& grid) {
  validate_scenario(base);
  if (grid.empty()) fail(ErrorCode::kSweep, "sweep grid is empty");

  constexpr std::array<ProsumerType, 4> kTypes{
      ProsumerType::kActiveSdg, ProsumerType::kPassiveSdg, ProsumerType::kActiveDg,
      ProsumerType::kPassiveDg};
  struct Point {
    std::optional<TariffSchedule> tariff;
    Battery battery;
  };
  SweepTable table;
  table.parameter = parameter;
  std::vector<Point> points(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    SweepRow row;
    row.value = grid[i];
    try {
      TariffSchedule tariff = parameter == SweepParameter::kExportRate
                                  ? base.tariff.with_export_rate(grid[i])
                                  : base.tariff;
      Battery battery = base.battery;
      if (parameter == SweepParameter::kEfficiency) {
        battery.charge_eff = grid[i];
        battery.discharge_eff = grid[i];
      }
      const std::vector<NemRate> rates = tariff.rates();
      if (base.auto_salvage) {
        double salvage =
            sandwich_midpoint_salvage(battery.charge_eff, battery.discharge_eff, rates);
        if (salvage < 0.0) fail(ErrorCode::kSandwich, "no salvage rate satisfies the sandwich");
        battery.salvage = salvage;
      }
      battery = Battery::make(battery.charge_limit, battery.discharge_limit,
                              battery.charge_eff, battery.discharge_eff, battery.soc_min,
                              battery.soc_max, battery.initial_soc, battery.salvage);
      if (!check_salvage_sandwich(battery, rates).pass)
        fail(ErrorCode::kSandwich, "salvage sandwich fails");
      row.salvage = battery.salvage;
      points[i] = {std::move(tariff), battery};
    } catch (const Error& err) {
      row.skipped = true;
      row.reason = err.what();
      std::replace(row.reason.begin(), row.reason.end(), ',', ';');
    }
    table.rows.push_back(row);
  }
  if (std::all_of(table.rows.begin(), table.rows.end(),
                  [](const SweepRow& r) { return r.skipped; }))
    fail(ErrorCode::kSweep, "every sweep point violates the salvage sandwich or is invalid");

  std::vector<double> daily(grid.size() * kTypes.size(), 0.0);
  parallel_for(daily.size(), [&](std::size_t job) {
    const std::size_t i = job / kTypes.size();
    if (table.rows[i].skipped) return;
    const Point& pt = points[i];
    SimReport rep = simulate_decisions(
        {base.traces, *pt.tariff, base.devices, pt.battery, kTypes[job % kTypes.size()]},
        SimOptions{false});
    settle(rep, *pt.tariff, base.traces);
    daily[job] = rep.daily_surplus;
  });

  auto index = [&](ProsumerType type) {
    return static_cast<std::size_t>(std::find(kTypes.begin(), kTypes.end(), type) -
                                    kTypes.begin());
  };
  for (std::size_t i = 0; i < grid.size(); ++i) {
    SweepRow& row = table.rows[i];
    if (row.skipped) continue;
    for (std::size_t p = 0; p < kPairings.size(); ++p) {
      double sdg = daily[i * kTypes.size() + index(kPairings[p].first)];
      double dg = daily[i * kTypes.size() + index(kPairings[p].second)];
      row.vos_daily[p] = sdg - dg;
      row.vos_pct[p] = gain_or_empty(sdg, dg);
    }
  }
  return table;
}

}  // namespace nemx
