#include "demand.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace nemx {

namespace {

struct ValueVisitor {
  double d;
  double operator()(const QuadraticUtility& q) const {
    double saturation = q.alpha / q.beta;
    if (d >= saturation) return q.alpha * q.alpha / (2.0 * q.beta);
    return q.alpha * d - 0.5 * q.beta * d * d;
  }
  double operator()(const CustomUtility& c) const { return c.value(d); }
};

struct MarginalVisitor {
  double d;
  double operator()(const QuadraticUtility& q) const {
    return std::max(0.0, q.alpha - q.beta * d);
  }
  double operator()(const CustomUtility& c) const { return c.marginal(d); }
};

struct InverseVisitor {
  double price;
  double operator()(const QuadraticUtility& q) const {
    if (price >= q.alpha) return 0.0;
    return (q.alpha - std::max(price, 0.0)) / q.beta;
  }
  double operator()(const CustomUtility& c) const {
    return std::max(0.0, c.inverse_marginal(price));
  }
};

void probe_custom(const CustomUtility& fn) {
  if (!fn.value || !fn.marginal || !fn.inverse_marginal)
    fail(ErrorCode::kInvalidArgument,
         "custom utility needs value, marginal and inverse callables");
  if (!(fn.probe_max > 0.0))
    fail(ErrorCode::kInvalidArgument, "custom utility probe range must be positive");
  constexpr int kProbe = 100;
  double prev_l = 0.0;
  double prev_u = 0.0;
  double prev_gain = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kProbe; ++i) {
    double d = fn.probe_max * i / (kProbe - 1);
    double l = fn.marginal(d);
    double u = fn.value(d);
    if (!std::isfinite(l) || !std::isfinite(u) || l < 0.0)
      fail(ErrorCode::kInvalidArgument,
           "custom utility is not finite with nonnegative marginal at d=" +
               std::to_string(d));
    if (i > 0) {
      if (prev_l > 0.0 && !(l < prev_l))
        fail(ErrorCode::kInvalidArgument,
             "custom marginal utility is not strictly decreasing near d=" +
                 std::to_string(d));
      double gain = u - prev_u;
      if (prev_l > 0.0 && !(gain > 0.0))
        fail(ErrorCode::kInvalidArgument,
             "custom utility is not increasing near d=" + std::to_string(d));
      if (gain > prev_gain + 1e-12 * std::max(1.0, std::abs(u)))
        fail(ErrorCode::kInvalidArgument,
             "custom utility is not concave near d=" + std::to_string(d));
      prev_gain = gain;
    }
    if (l > 0.0) {
      double back = fn.inverse_marginal(l);
      if (!(std::abs(back - d) <= 1e-6 * std::max(1.0, d)))
        fail(ErrorCode::kInvalidArgument,
             "custom inverse marginal disagrees with marginal at d=" +
                 std::to_string(d));
    }
    prev_l = l;
    prev_u = u;
  }
}

}  // namespace

UtilityFn UtilityFn::quadratic(double alpha, double beta) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    fail(ErrorCode::kInvalidArgument, "quadratic utility needs alpha > 0");
  if (!(beta > 0.0) || !std::isfinite(beta))
    fail(ErrorCode::kInvalidArgument, "quadratic utility needs beta > 0");
  return UtilityFn(QuadraticUtility{alpha, beta});
}

UtilityFn UtilityFn::custom(CustomUtility fn) {
  probe_custom(fn);
  return UtilityFn(std::move(fn));
}

double UtilityFn::value(double d) const {
  return std::visit(ValueVisitor{d}, impl_);
}

double UtilityFn::marginal(double d) const {
  return std::visit(MarginalVisitor{d}, impl_);
}

double UtilityFn::inverse_marginal(double price) const {
  return std::visit(InverseVisitor{price}, impl_);
}

Device::Device(std::string id, double d_min, double d_max, UtilityFn utility,
               std::vector<UtilityFn> profile)
    : id_(std::move(id)),
      d_min_(d_min),
      d_max_(d_max),
      utility_(std::move(utility)),
      profile_(std::move(profile)) {
  if (!std::isfinite(d_min_) || !std::isfinite(d_max_))
    fail(ErrorCode::kInvalidArgument, "device '" + id_ + "' bounds must be finite");
  if (d_min_ < 0.0 || d_min_ > d_max_)
    fail(ErrorCode::kInvalidArgument,
         "device '" + id_ + "' needs 0 <= d_min <= d_max");
}

const UtilityFn& Device::utility_at(std::size_t t) const {
  if (profile_.empty()) return utility_;
  return profile_[t % profile_.size()];
}

double Device::marginal_utility(double d, std::size_t t) const {
  if (d < 0.0)
    fail(ErrorCode::kDomain, "marginal utility needs nonnegative consumption");
  return utility_at(t).marginal(d);
}

double Device::utility_value(double d, std::size_t t) const {
  return utility_at(t).value(d);
}

double Device::response(double price, std::size_t t) const {
  if (uncontrollable()) return d_min_;
  return std::clamp(utility_at(t).inverse_marginal(price), d_min_, d_max_);
}

std::vector<double> responses(DeviceSpan devices, double price, std::size_t t) {
  std::vector<double> out;
  out.reserve(devices.size());
  for (const Device& dev : devices) out.push_back(dev.response(price, t));
  return out;
}

double aggregate_response(DeviceSpan devices, double price, std::size_t t) {
  double sum = 0.0;
  for (const Device& dev : devices) sum += dev.response(price, t);
  return sum;
}

double total_utility(DeviceSpan devices, std::span<const double> d,
                     std::size_t t) {
  double sum = 0.0;
  for (std::size_t k = 0; k < devices.size(); ++k)
    sum += devices[k].utility_value(d[k], t);
  return sum;
}

double max_activation_price(DeviceSpan devices, std::size_t t) {
  double p = 0.0;
  for (const Device& dev : devices)
    if (!dev.uncontrollable())
      p = std::max(p, dev.marginal_utility(dev.d_min(), t));
  return p;
}

namespace {

void check_target(DeviceSpan devices, double target, std::size_t t) {
  double low = 0.0;
  for (const Device& dev : devices) low += dev.d_min();
  double high = aggregate_response(devices, 0.0, t);
  double tol = kInversionTolerance * std::max(1.0, std::abs(target));
  if (!(target >= low - tol && target <= high + tol))
    fail(ErrorCode::kInfeasibleTarget,
         "target " + std::to_string(target) + " kWh outside response range [" +
             std::to_string(low) + ", " + std::to_string(high) + "]");
}

}  // namespace

double invert_aggregate(DeviceSpan devices, double target, std::size_t t) {
  check_target(devices, target, t);
  const double top = max_activation_price(devices, t);
  if (!(top > 0.0)) return 0.0;
  auto f = [&](double p) { return aggregate_response(devices, p, t); };

  // sup { p : f(p) >= target }
  double upper = top;
  if (f(top) < target) {
    double lo = 0.0;
    double hi = top;
    for (int i = 0; i < kBisectionCap; ++i) {
      double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (f(mid) >= target ? lo : hi) = mid;
    }
    upper = lo;
  }
  // inf { p : f(p) <= target }
  double lower = 0.0;
  if (f(0.0) > target) {
    double lo = 0.0;
    double hi = top;
    for (int i = 0; i < kBisectionCap; ++i) {
      double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (f(mid) <= target ? hi : lo) = mid;
    }
    lower = hi;
  }
  return 0.5 * (lower + upper);
}

double invert_aggregate_exact(DeviceSpan devices, double target,
                              std::size_t t) {
  check_target(devices, target, t);
  const double top = max_activation_price(devices, t);
  if (!(top > 0.0)) return 0.0;

  std::vector<double> knots{0.0, top};
  for (const Device& dev : devices) {
    if (dev.uncontrollable()) continue;
    const QuadraticUtility* q = dev.utility_at(t).as_quadratic();
    if (q == nullptr)
      fail(ErrorCode::kInvalidArgument,
           "exact inversion needs quadratic utilities (device '" + dev.id() +
               "')");
    for (double k : {q->alpha - q->beta * dev.d_max(),
                     q->alpha - q->beta * dev.d_min()})
      if (k > 0.0 && k < top) knots.push_back(k);
  }
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  std::vector<double> values;
  values.reserve(knots.size());
  for (double k : knots) values.push_back(aggregate_response(devices, k, t));

  // Plateau hit: every knot with f == target (to rounding); return the
  // middle of them.
  const double tol = kInversionTolerance * std::max(1.0, std::abs(target));
  std::size_t first = knots.size();
  std::size_t last = 0;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (std::abs(values[i] - target) <= tol) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first < knots.size()) return 0.5 * (knots[first] + knots[last]);

  if (target >= values.front()) return knots.front();
  if (target <= values.back()) return knots.back();
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    if (values[i] >= target && target >= values[i + 1]) {
      double drop = values[i] - values[i + 1];
      return knots[i] + (values[i] - target) / drop * (knots[i + 1] - knots[i]);
    }
  }
  return knots.back();
}

std::vector<double> allocate(DeviceSpan devices, double target, std::size_t t) {
  bool quadratic = true;
  for (const Device& dev : devices)
    quadratic = quadratic && (dev.uncontrollable() ||
                              dev.utility_at(t).as_quadratic() != nullptr);
  double price = quadratic ? invert_aggregate_exact(devices, target, t)
                           : invert_aggregate(devices, target, t);
  return responses(devices, price, t);
}

QuadraticUtility calibrate_quadratic(double baseline_kwh,
                                     double baseline_price,
                                     double elasticity) {
  if (!(baseline_kwh > 0.0))
    fail(ErrorCode::kCalibration, "calibration needs positive baseline consumption");
  if (!(baseline_price > 0.0))
    fail(ErrorCode::kCalibration, "calibration needs positive baseline price");
  if (!(elasticity < 0.0))
    fail(ErrorCode::kCalibration,
         "calibration needs negative elasticity (downward-sloping demand)");
  double beta = -baseline_price / (elasticity * baseline_kwh);
  if (!(beta >= kMinCalibratedBeta))
    fail(ErrorCode::kCalibration,
         "calibrated beta below minimum (perfectly elastic limit)");
  return {baseline_price + beta * baseline_kwh, beta};
}

}  // namespace nemx
