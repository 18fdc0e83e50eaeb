#include "traces.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "error.hpp"
#include "rng.hpp"

namespace nemx {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date.
long long days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const long long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long long>(doe) - 719468;
}

void civil_from_days(long long z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const long long era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y = static_cast<int>(yoe + era * 400 + (m <= 2));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    cell.erase(0, cell.find_first_not_of(" \t\r"));
    cell.erase(cell.find_last_not_of(" \t\r") + 1);
    out.push_back(cell);
  }
  return out;
}

}  // namespace

std::string iso_timestamp(const std::string& start_date, long long minutes) {
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  if (std::sscanf(start_date.c_str(), "%d-%u-%u", &y, &m, &d) != 3 || m < 1 ||
      m > 12 || d < 1 || d > 31)
    fail(ErrorCode::kConfig, "invalid start date '" + start_date + "'");
  long long day = days_from_civil(y, m, d) + minutes / 1440;
  long long minute = minutes % 1440;
  civil_from_days(day, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:00", y, m, d,
                minute / 60, minute % 60);
  return buf;
}

Traces synthesize_traces(const SyntheticTraceSpec& spec) {
  if (spec.days == 0) fail(ErrorCode::kConfig, "synthetic traces need at least one day");
  if (!(spec.interval_minutes > 0.0) ||
      std::fmod(1440.0, spec.interval_minutes) != 0.0)
    fail(ErrorCode::kConfig, "interval length must divide the day");
  const auto per_day = static_cast<std::size_t>(1440.0 / spec.interval_minutes);
  const double hours = spec.interval_minutes / 60.0;
  Rng rng(spec.seed);
  Traces out;
  out.generation.reserve(spec.days * per_day);
  out.baseline.reserve(spec.days * per_day);
  out.timestamps.reserve(spec.days * per_day);
  double pv_noise = 0.0;
  double load_noise = 0.0;
  const double keep = 0.98;
  const double innovation = std::sqrt(1.0 - keep * keep);
  for (std::size_t day = 0; day < spec.days; ++day) {
    const double u = rng.uniform();
    const double clear = 1.0 - spec.cloudiness * u * u;
    const double load_scale = rng.uniform(0.85, 1.15);
    for (std::size_t i = 0; i < per_day; ++i) {
      const double minute = static_cast<double>(i) * spec.interval_minutes;
      const double h = (minute + 0.5 * spec.interval_minutes) / 60.0;
      pv_noise = keep * pv_noise + innovation * rng.normal();
      load_noise = keep * load_noise + innovation * rng.normal();

      double sun = (h > 6.0 && h < 20.0) ? std::sin(M_PI * (h - 6.0) / 14.0) : 0.0;
      double pv_kw = spec.pv_kw * std::pow(sun, 1.3) * clear *
                     (1.0 + spec.noise * pv_noise);
      pv_kw = std::clamp(pv_kw, 0.0, spec.pv_kw);

      double load_kw =
          spec.base_kw +
          spec.morning_kw * std::exp(-std::pow((h - 7.5) / 1.0, 2.0)) +
          spec.evening_kw * std::exp(-std::pow((h - 19.5) / 1.5, 2.0));
      load_kw *= load_scale * (1.0 + spec.noise * load_noise);
      load_kw = std::max(load_kw, 0.05);

      out.generation.push_back(pv_kw * hours);
      out.baseline.push_back(load_kw * hours);
      out.timestamps.push_back(iso_timestamp(
          spec.start_date, static_cast<long long>(day * 1440 + minute)));
    }
  }
  return out;
}

Traces read_traces_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open trace file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::kConfig, path + ": empty trace file");
  auto header = split_csv(line);
  auto column = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      fail(ErrorCode::kConfig, path + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_time = column("timestamp");
  const std::size_t c_gen = column("generation_kwh");
  const std::size_t c_base = column("baseline_kwh");
  Traces out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv(line);
    if (cells.size() < header.size())
      fail(ErrorCode::kConfig, path + ":" + std::to_string(row) + ": too few columns");
    double g = 0.0;
    double b = 0.0;
    try {
      g = std::stod(cells[c_gen]);
      b = std::stod(cells[c_base]);
    } catch (const std::exception&) {
      fail(ErrorCode::kConfig, path + ":" + std::to_string(row) + ": non-numeric value");
    }
    if (!(g >= 0.0) || !(b >= 0.0) || !std::isfinite(g) || !std::isfinite(b))
      fail(ErrorCode::kConfig, path + ":" + std::to_string(row) +
                                   ": generation and baseline must be finite and nonnegative");
    out.timestamps.push_back(cells[c_time]);
    out.generation.push_back(g);
    out.baseline.push_back(b);
  }
  if (out.generation.empty()) fail(ErrorCode::kConfig, path + ": no trace rows");
  return out;
}

std::string traces_to_csv(const Traces& traces) {
  std::string out = "timestamp,generation_kwh,baseline_kwh\n";
  char buf[96];
  for (std::size_t t = 0; t < traces.size(); ++t) {
    std::snprintf(buf, sizeof buf, ",%.9g,%.9g\n", traces.generation[t], traces.baseline[t]);
    out += t < traces.timestamps.size() ? traces.timestamps[t] : std::to_string(t);
    out += buf;
  }
  return out;
}

}  // namespace nemx
