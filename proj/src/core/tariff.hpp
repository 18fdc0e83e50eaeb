#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nemx {

// NEM X rate: buy (retail) rate, export (compensation) rate, fixed charge.
// buy >= export >= 0 is enforced so that the payment is convex in net
// consumption.
struct NemRate {
  double buy = 0.0;          // $/kWh
  double export_rate = 0.0;  // $/kWh
  double fixed = 0.0;        // $ per billing window

  static NemRate make(double buy, double export_rate, double fixed = 0.0);

  NemRate without_fixed() const { return {buy, export_rate, 0.0}; }
};

inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }
inline double negative_part(double x) { return x < 0.0 ? -x : 0.0; }

// Payment for net consumption z: buy*[z]+ - export*[z]- + fixed.
double payment(const NemRate& rate, double z);

// Minutes after midnight for "HH:MM"; "24:00" is accepted.
int parse_clock(std::string_view hhmm);
std::string format_clock(int minute_of_day);

struct RateWindow {
  int start_minute = 0;  // inclusive
  int end_minute = 0;    // exclusive; end <= start wraps past midnight
  NemRate rate;
};

// Time-of-use schedule over a horizon of fixed-length intervals. The daily
// windows must tile the 24-hour clock exactly once. An optional per-interval
// export-rate trace overrides the windows' export rates.
class TariffSchedule {
 public:
  TariffSchedule(std::vector<RateWindow> windows, double interval_hours,
                 std::size_t netting_intervals, std::size_t horizon,
                 int start_minute = 0, std::vector<double> export_trace = {});

  static TariffSchedule flat(const NemRate& rate, double interval_hours,
                             std::size_t netting_intervals,
                             std::size_t horizon);

  NemRate rate_at(std::size_t t) const;

  // All rates in force over the horizon, one per interval.
  std::vector<NemRate> rates() const;

  const std::vector<RateWindow>& windows() const { return windows_; }
  double interval_hours() const { return interval_hours_; }
  std::size_t netting_intervals() const { return netting_; }
  std::size_t horizon() const { return horizon_; }
  int start_minute() const { return start_minute_; }
  const std::vector<double>& export_trace() const { return export_trace_; }

  // Copies with one field replaced; validation is re-run. with_netting
  // rescales the per-window fixed charge to the new window length.
  TariffSchedule with_netting(std::size_t netting_intervals) const;
  TariffSchedule with_export_rate(double export_rate) const;
  TariffSchedule with_windows(std::vector<RateWindow> windows) const;

 private:
  std::size_t window_index(std::size_t t) const;

  std::vector<RateWindow> windows_;
  std::vector<int> minute_owner_;  // 1440 entries, window index per minute
  double interval_hours_;
  std::size_t netting_;
  std::size_t horizon_;
  int start_minute_;
  std::vector<double> export_trace_;
};

// Per-window payments: z is summed over each netting window and billed at
// the rate in force at the window's first interval.
std::vector<double> bill_trace(const TariffSchedule& schedule,
                               std::span<const double> z_trace);

// Number of netting windows over [0, length) whose rates change inside the
// window. Such windows are billed at their first interval's rate.
std::size_t straddling_windows(const TariffSchedule& schedule,
                               std::size_t length);

// Round to 4 decimals for money reported in bills and reports.
double round_money(double value);

}  // namespace nemx
