#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace nemx {

// Per-interval generation and baseline demand, kWh per interval.
struct Traces {
  std::vector<std::string> timestamps;  // ISO-8601 local time
  std::vector<double> generation;
  std::vector<double> baseline;

  std::size_t size() const { return generation.size(); }
};

// Sinusoidal clear-sky solar with day-level cloudiness and intra-day noise,
// plus a household load with morning and evening peaks. Deterministic in the
// seed.
struct SyntheticTraceSpec {
  std::size_t days = 90;
  std::uint64_t seed = 42;
  double interval_minutes = 1.0;
  std::string start_date = "2016-06-01";
  double pv_kw = 5.0;
  double cloudiness = 0.35;  // maximum fraction of output lost on a cloudy day
  double base_kw = 0.35;
  double morning_kw = 0.9;
  double evening_kw = 1.6;
  double noise = 0.1;  // relative std-dev of minute-level fluctuations
};

Traces synthesize_traces(const SyntheticTraceSpec& spec);

// CSV with header timestamp,generation_kwh,baseline_kwh.
Traces read_traces_csv(const std::string& path);
std::string traces_to_csv(const Traces& traces);

// "YYYY-MM-DD" plus a minute offset, rendered as YYYY-MM-DDTHH:MM:SS.
std::string iso_timestamp(const std::string& start_date, long long minutes);

}  // namespace nemx
