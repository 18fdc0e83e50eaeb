#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace nemx {

// U(d) = alpha*d - beta/2*d^2 below saturation alpha/beta, flat beyond.
struct QuadraticUtility {
  double alpha = 0.0;  // $/kWh
  double beta = 0.0;   // $/kWh^2
};

// Caller-supplied strictly concave utility. All three callables must be
// mutually consistent; construction probes them on a 100-point grid.
struct CustomUtility {
  std::function<double(double)> value;
  std::function<double(double)> marginal;
  std::function<double(double)> inverse_marginal;
  double probe_max = 1.0;  // upper end of the probe grid, kWh
};

class UtilityFn {
 public:
  static UtilityFn quadratic(double alpha, double beta);
  static UtilityFn custom(CustomUtility fn);

  double value(double d) const;
  // L(d); nonincreasing, zero past saturation.
  double marginal(double d) const;
  // Smallest d >= 0 with L(d) <= price.
  double inverse_marginal(double price) const;

  const QuadraticUtility* as_quadratic() const {
    return std::get_if<QuadraticUtility>(&impl_);
  }

 private:
  explicit UtilityFn(std::variant<QuadraticUtility, CustomUtility> impl)
      : impl_(std::move(impl)) {}

  std::variant<QuadraticUtility, CustomUtility> impl_;
};

// A controllable (d_min < d_max) or uncontrollable (d_min == d_max) load.
// The utility may vary by interval through a cyclic profile: interval t
// uses profile[t % profile.size()] when the profile is nonempty.
class Device {
 public:
  Device(std::string id, double d_min, double d_max, UtilityFn utility,
         std::vector<UtilityFn> profile = {});

  const std::string& id() const { return id_; }
  double d_min() const { return d_min_; }
  double d_max() const { return d_max_; }
  bool uncontrollable() const { return d_min_ == d_max_; }

  const UtilityFn& utility_at(std::size_t t) const;

  double marginal_utility(double d, std::size_t t) const;
  double utility_value(double d, std::size_t t) const;
  // Clamp of L^{-1}(price) to [d_min, d_max].
  double response(double price, std::size_t t) const;

 private:
  std::string id_;
  double d_min_;
  double d_max_;
  UtilityFn utility_;
  std::vector<UtilityFn> profile_;
};

using DeviceSpan = std::span<const Device>;

std::vector<double> responses(DeviceSpan devices, double price, std::size_t t);
double aggregate_response(DeviceSpan devices, double price, std::size_t t);
double total_utility(DeviceSpan devices, std::span<const double> d,
                     std::size_t t);

// Highest price worth scanning: above it every device sits at d_min.
double max_activation_price(DeviceSpan devices, std::size_t t);

// Price lambda at which the aggregate response equals target, found by
// bisection. On a plateau of the aggregate response the plateau midpoint is
// returned; the per-device allocation is the same anywhere on it.
double invert_aggregate(DeviceSpan devices, double target, std::size_t t);

// Exact piecewise-linear inverse for all-quadratic device sets.
double invert_aggregate_exact(DeviceSpan devices, double target,
                              std::size_t t);

// Utility-maximizing split of target across devices (water-filling). Uses
// the exact inverse when every controllable device is quadratic at t.
std::vector<double> allocate(DeviceSpan devices, double target, std::size_t t);

// Linear demand curve through (baseline_kwh, baseline_price) with the given
// point elasticity; L(baseline_kwh) == baseline_price.
QuadraticUtility calibrate_quadratic(double baseline_kwh,
                                     double baseline_price, double elasticity);

inline constexpr double kInversionTolerance = 1e-9;
inline constexpr int kBisectionCap = 200;
inline constexpr double kMinCalibratedBeta = 1e-9;

}  // namespace nemx
