#include "tariff.hpp"

#include <cmath>
#include <cstdio>

#include "error.hpp"

namespace nemx {

namespace {
constexpr int kMinutesPerDay = 1440;
}

NemRate NemRate::make(double buy, double export_rate, double fixed) {
  if (!std::isfinite(buy) || !std::isfinite(export_rate) ||
      !std::isfinite(fixed))
    fail(ErrorCode::kInvalidArgument, "rate components must be finite");
  if (buy < 0.0 || export_rate < 0.0 || fixed < 0.0)
    fail(ErrorCode::kInvalidArgument, "rate components must be nonnegative");
  if (buy < export_rate)
    fail(ErrorCode::kInvalidArgument,
         "buy rate must be at least the export rate");
  return {buy, export_rate, fixed};
}

double payment(const NemRate& rate, double z) {
  return rate.buy * positive_part(z) - rate.export_rate * negative_part(z) +
         rate.fixed;
}

int parse_clock(std::string_view hhmm) {
  int hours = 0;
  int minutes = 0;
  char tail = 0;
  std::string text(hhmm);
  if (std::sscanf(text.c_str(), "%d:%d%c", &hours, &minutes, &tail) != 2 ||
      hours < 0 || minutes < 0 || minutes > 59 || hours > 24 ||
      (hours == 24 && minutes != 0))
    fail(ErrorCode::kConfig, "invalid clock time '" + text + "' (want HH:MM)");
  return hours * 60 + minutes;
}

std::string format_clock(int minute_of_day) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%02d:%02d", minute_of_day / 60,
                minute_of_day % 60);
  return buf;
}

TariffSchedule::TariffSchedule(std::vector<RateWindow> windows,
                               double interval_hours,
                               std::size_t netting_intervals,
                               std::size_t horizon, int start_minute,
                               std::vector<double> export_trace)
    : windows_(std::move(windows)),
      minute_owner_(kMinutesPerDay, -1),
      interval_hours_(interval_hours),
      netting_(netting_intervals),
      horizon_(horizon),
      start_minute_(start_minute),
      export_trace_(std::move(export_trace)) {
  if (windows_.empty()) fail(ErrorCode::kConfig, "tariff has no rate windows");
  if (!(interval_hours_ > 0.0) || interval_hours_ > 24.0)
    fail(ErrorCode::kConfig, "interval duration must lie in (0, 24] hours");
  if (netting_ == 0)
    fail(ErrorCode::kConfig, "netting window must be a positive interval count");
  if (horizon_ == 0) fail(ErrorCode::kConfig, "horizon must be positive");
  if (horizon_ % netting_ != 0)
    fail(ErrorCode::kConfig, "netting window (" + std::to_string(netting_) +
                                 ") does not divide horizon (" +
                                 std::to_string(horizon_) + ")");
  if (start_minute_ < 0 || start_minute_ >= kMinutesPerDay)
    fail(ErrorCode::kConfig, "start time must lie within the day");

  for (std::size_t w = 0; w < windows_.size(); ++w) {
    const RateWindow& win = windows_[w];
    NemRate::make(win.rate.buy, win.rate.export_rate, win.rate.fixed);
    int start = win.start_minute % kMinutesPerDay;
    int end = win.end_minute % kMinutesPerDay;
    int length = end > start ? end - start : end - start + kMinutesPerDay;
    for (int m = 0; m < length; ++m) {
      int minute = (start + m) % kMinutesPerDay;
      if (minute_owner_[minute] != -1)
        fail(ErrorCode::kConfig,
             "tariff windows overlap at " + format_clock(minute));
      minute_owner_[minute] = static_cast<int>(w);
    }
  }
  for (int m = 0; m < kMinutesPerDay; ++m)
    if (minute_owner_[m] == -1)
      fail(ErrorCode::kConfig, "tariff windows leave a gap at " +
                                   format_clock(m));

  if (!export_trace_.empty()) {
    if (export_trace_.size() != horizon_)
      fail(ErrorCode::kConfig, "export-rate trace length " +
                                   std::to_string(export_trace_.size()) +
                                   " differs from horizon " +
                                   std::to_string(horizon_));
    for (std::size_t t = 0; t < horizon_; ++t) {
      const NemRate& base = windows_[window_index(t)].rate;
      if (!(export_trace_[t] >= 0.0) || export_trace_[t] > base.buy)
        fail(ErrorCode::kConfig,
             "export rate at interval " + std::to_string(t) +
                 " must lie in [0, buy rate]");
    }
  }
}

TariffSchedule TariffSchedule::flat(const NemRate& rate, double interval_hours,
                                    std::size_t netting_intervals,
                                    std::size_t horizon) {
  return TariffSchedule({{0, 0, rate}}, interval_hours, netting_intervals,
                        horizon);
}

std::size_t TariffSchedule::window_index(std::size_t t) const {
  double minutes = static_cast<double>(t) * interval_hours_ * 60.0;
  auto offset = static_cast<long long>(std::floor(minutes + 1e-6));
  auto minute = static_cast<int>((start_minute_ + offset) % kMinutesPerDay);
  return static_cast<std::size_t>(minute_owner_[minute]);
}

NemRate TariffSchedule::rate_at(std::size_t t) const {
  if (t >= horizon_)
    fail(ErrorCode::kRange, "interval " + std::to_string(t) +
                                " outside horizon " + std::to_string(horizon_));
  NemRate rate = windows_[window_index(t)].rate;
  if (!export_trace_.empty()) rate.export_rate = export_trace_[t];
  return rate;
}

std::vector<NemRate> TariffSchedule::rates() const {
  std::vector<NemRate> out;
  out.reserve(horizon_);
  for (std::size_t t = 0; t < horizon_; ++t) out.push_back(rate_at(t));
  return out;
}

TariffSchedule TariffSchedule::with_netting(std::size_t netting_intervals) const {
  // The fixed charge is per billing window, so it scales with window length.
  std::vector<RateWindow> windows = windows_;
  if (netting_intervals > 0)
    for (auto& w : windows)
      w.rate.fixed *= static_cast<double>(netting_intervals) /
                      static_cast<double>(netting_);
  return TariffSchedule(std::move(windows), interval_hours_, netting_intervals,
                        horizon_, start_minute_, export_trace_);
}

TariffSchedule TariffSchedule::with_export_rate(double export_rate) const {
  std::vector<RateWindow> windows = windows_;
  for (auto& w : windows) w.rate.export_rate = export_rate;
  return TariffSchedule(std::move(windows), interval_hours_, netting_,
                        horizon_, start_minute_);
}

TariffSchedule TariffSchedule::with_windows(std::vector<RateWindow> windows) const {
  return TariffSchedule(std::move(windows), interval_hours_, netting_,
                        horizon_, start_minute_, export_trace_);
}

std::vector<double> bill_trace(const TariffSchedule& schedule,
                               std::span<const double> z_trace) {
  const std::size_t window = schedule.netting_intervals();
  if (z_trace.size() % window != 0)
    fail(ErrorCode::kConfig, "trace length " + std::to_string(z_trace.size()) +
                                 " is not a multiple of the netting window " +
                                 std::to_string(window));
  std::vector<double> bills;
  bills.reserve(z_trace.size() / window);
  for (std::size_t start = 0; start < z_trace.size(); start += window) {
    double net = 0.0;
    for (std::size_t i = 0; i < window; ++i) net += z_trace[start + i];
    bills.push_back(payment(schedule.rate_at(start), net));
  }
  return bills;
}

std::size_t straddling_windows(const TariffSchedule& schedule,
                               std::size_t length) {
  const std::size_t window = schedule.netting_intervals();
  std::size_t count = 0;
  for (std::size_t start = 0; start + window <= length; start += window) {
    NemRate first = schedule.rate_at(start);
    for (std::size_t i = 1; i < window; ++i) {
      NemRate r = schedule.rate_at(start + i);
      if (r.buy != first.buy || r.export_rate != first.export_rate ||
          r.fixed != first.fixed) {
        ++count;
        break;
      }
    }
  }
  return count;
}

double round_money(double value) {
  double r = std::round(value * 1e4) / 1e4;
  return r == 0.0 ? 0.0 : r;
}

}  // namespace nemx
