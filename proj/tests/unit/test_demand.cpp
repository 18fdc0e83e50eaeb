#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "demand.hpp"
#include "error.hpp"
#include "generators.hpp"
#include "rng.hpp"

using namespace nemx;

namespace {

Device quad(const std::string& id, double alpha, double beta, double lo = 0.0, double hi = 10.0) {
  return Device(id, lo, hi, UtilityFn::quadratic(alpha, beta));
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(0);
}

}  // namespace

TEST(Marginal, QuadraticValues) {
  Device d = quad("a", 1.0, 0.1);
  EXPECT_DOUBLE_EQ(d.marginal_utility(0.0, 0), 1.0);
  EXPECT_DOUBLE_EQ(d.marginal_utility(5.0, 0), 0.5);
  EXPECT_DOUBLE_EQ(d.marginal_utility(12.0, 0), 0.0);
  EXPECT_EQ(code_of([&] { d.marginal_utility(-1.0, 0); }), ErrorCode::kDomain);
}

TEST(Utility, SaturatesPastPeak) {
  auto u = UtilityFn::quadratic(1.0, 0.1);
  EXPECT_DOUBLE_EQ(u.value(10.0), 5.0);
  EXPECT_DOUBLE_EQ(u.value(14.0), 5.0);
  EXPECT_DOUBLE_EQ(u.value(4.0), 4.0 - 0.05 * 16.0);
}

TEST(Response, ClampsToBounds) {
  EXPECT_DOUBLE_EQ(quad("a", 1.0, 0.1).response(0.5, 0), 5.0);
  EXPECT_DOUBLE_EQ(quad("a", 1.0, 0.1).response(1.2, 0), 0.0);
  EXPECT_DOUBLE_EQ(quad("a", 1.0, 0.1, 0.0, 3.0).response(0.5, 0), 3.0);
  EXPECT_DOUBLE_EQ(quad("a", 1.0, 0.1, 2.0, 10.0).response(0.95, 0), 2.0);
}

TEST(Response, UncontrollableIgnoresPrice) {
  Device d("fridge", 1.5, 1.5, UtilityFn::quadratic(0.2, 1.0));
  for (double p : {0.0, 0.1, 5.0}) EXPECT_DOUBLE_EQ(d.response(p, 0), 1.5);
}

TEST(Aggregate, SumsDeviceResponses) {
  std::vector<Device> one{quad("a", 1.0, 0.1)};
  EXPECT_DOUBLE_EQ(aggregate_response(one, 0.3, 0), one[0].response(0.3, 0));
  std::vector<Device> two{quad("a", 1.0, 0.1), quad("b", 1.0, 0.1)};
  EXPECT_DOUBLE_EQ(aggregate_response(two, 0.5, 0), 10.0);
  EXPECT_DOUBLE_EQ(aggregate_response(two, 1.0, 0), 0.0);
}

TEST(Aggregate, NonincreasingInPrice) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    StageConfig s = nemx::testing::random_stage(rng);
    double prev = 1e300;
    for (double p = 0.0; p <= 1.5; p += 0.01) {
      double f = aggregate_response(s.devices, p, 0);
      EXPECT_LE(f, prev);
      prev = f;
    }
  }
}

TEST(Invert, SymmetricWaterFilling) {
  std::vector<Device> two{quad("a", 1.0, 0.1), quad("b", 1.0, 0.1)};
  double lambda = invert_aggregate(two, 10.0, 0);
  EXPECT_NEAR(lambda, 0.5, 1e-9);
  auto d = allocate(two, 10.0, 0);
  EXPECT_NEAR(d[0], 5.0, 1e-9);
  EXPECT_NEAR(d[1], 5.0, 1e-9);
}

TEST(Invert, SingleDeviceRecoversMarginal) {
  std::vector<Device> one{quad("a", 1.0, 0.1)};
  for (double target : {0.5, 3.0, 7.25, 9.9})
    EXPECT_NEAR(invert_aggregate(one, target, 0), one[0].marginal_utility(target, 0), 1e-9);
}

TEST(Invert, SecondDeviceAtActivationPrice) {
  std::vector<Device> two{quad("a", 1.0, 0.1), quad("b", 0.6, 0.1)};
  EXPECT_NEAR(invert_aggregate(two, 4.0, 0), 0.6, 1e-9);
  auto d = allocate(two, 4.0, 0);
  EXPECT_NEAR(d[0], 4.0, 1e-9);
  EXPECT_NEAR(d[1], 0.0, 1e-9);
}

TEST(Invert, TargetOutsideRangeIsRejected) {
  std::vector<Device> one{quad("a", 1.0, 0.1, 1.0, 5.0)};
  EXPECT_EQ(code_of([&] { invert_aggregate(one, 0.5, 0); }), ErrorCode::kInfeasibleTarget);
  EXPECT_EQ(code_of([&] { invert_aggregate(one, 6.0, 0); }), ErrorCode::kInfeasibleTarget);
}

TEST(Invert, PlateauReturnsMidpoint) {
  std::vector<Device> two{quad("a", 1.0, 0.1, 0.0, 2.0), quad("b", 0.5, 0.1, 0.0, 10.0)};
  // f(p) = 2 for p in [0.5, 0.8]; the inverse of 2 is that plateau.
  double lambda = invert_aggregate(two, 2.0, 0);
  EXPECT_NEAR(lambda, 0.65, 1e-9);
  EXPECT_NEAR(invert_aggregate_exact(two, 2.0, 0), 0.65, 1e-12);
}

TEST(Invert, AllocationRoundTrip) {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    StageConfig s = nemx::testing::random_stage(rng);
    for (double p : {0.0, 0.05, 0.2, 0.35, 0.5, 0.9}) {
      auto expected = responses(s.devices, p, 0);
      double target = aggregate_response(s.devices, p, 0);
      auto got = allocate(s.devices, target, 0);
      for (std::size_t k = 0; k < got.size(); ++k) EXPECT_NEAR(got[k], expected[k], 1e-9);
    }
  }
}

TEST(Invert, ExactMatchesBisection) {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    StageConfig s = nemx::testing::random_stage(rng);
    double lo = 0.0;
    for (const auto& d : s.devices) lo += d.d_min();
    double hi = aggregate_response(s.devices, 0.0, 0);
    for (int i = 0; i <= 20; ++i) {
      double target = lo + (hi - lo) * i / 20.0;
      double a = invert_aggregate(s.devices, target, 0);
      double b = invert_aggregate_exact(s.devices, target, 0);
      EXPECT_NEAR(aggregate_response(s.devices, a, 0), target, 1e-9 * std::max(1.0, target));
      EXPECT_NEAR(aggregate_response(s.devices, b, 0), target, 1e-9 * std::max(1.0, target));
      auto da = responses(s.devices, a, 0);
      auto db = responses(s.devices, b, 0);
      for (std::size_t k = 0; k < da.size(); ++k) EXPECT_NEAR(da[k], db[k], 1e-8);
    }
  }
}

TEST(Invert, CustomUtilityUsesBisection) {
  // U(d) = log(1 + d): L(d) = 1/(1+d), L^-1(p) = 1/p - 1.
  CustomUtility fn;
  fn.value = [](double d) { return std::log1p(d); };
  fn.marginal = [](double d) { return 1.0 / (1.0 + d); };
  fn.inverse_marginal = [](double p) { return p <= 0.0 ? 1e9 : std::max(0.0, 1.0 / p - 1.0); };
  fn.probe_max = 10.0;
  std::vector<Device> devs{Device("log", 0.0, 10.0, UtilityFn::custom(fn))};
  EXPECT_NEAR(invert_aggregate(devs, 3.0, 0), 0.25, 1e-9);
  EXPECT_EQ(code_of([&] { invert_aggregate_exact(devs, 3.0, 0); }), ErrorCode::kInvalidArgument);
  auto d = allocate(devs, 3.0, 0);
  EXPECT_NEAR(d[0], 3.0, 1e-9);
}

TEST(CustomUtility, InconsistentCallablesAreRejected) {
  CustomUtility fn;
  fn.value = [](double d) { return d; };
  fn.marginal = [](double d) { return 1.0 + d; };  // increasing: not concave
  fn.inverse_marginal = [](double) { return 0.0; };
  EXPECT_THROW(UtilityFn::custom(fn), Error);
}

TEST(Calibration, ReproducesBaselinePoint) {
  auto q = calibrate_quadratic(2.0, 0.4, -0.21);
  EXPECT_NEAR(q.beta, 0.952380952, 1e-8);
  EXPECT_NEAR(q.alpha, 2.304761905, 1e-8);
  EXPECT_NEAR(q.alpha - q.beta * 2.0, 0.4, 1e-12);
  // Point elasticity of the linear demand curve at the baseline.
  EXPECT_NEAR((-1.0 / q.beta) * 0.4 / 2.0, -0.21, 1e-12);
}

TEST(Calibration, UnitCase) {
  auto q = calibrate_quadratic(1.0, 1.0, -1.0);
  EXPECT_DOUBLE_EQ(q.beta, 1.0);
  EXPECT_DOUBLE_EQ(q.alpha, 2.0);
}

TEST(Calibration, RejectsDegenerateInputs) {
  EXPECT_EQ(code_of([] { calibrate_quadratic(2.0, 0.4, 0.1); }), ErrorCode::kCalibration);
  EXPECT_EQ(code_of([] { calibrate_quadratic(0.0, 0.4, -0.2); }), ErrorCode::kCalibration);
  EXPECT_EQ(code_of([] { calibrate_quadratic(2.0, 0.4, -1e12); }), ErrorCode::kCalibration);
}

TEST(Device, ProfileCyclesByInterval) {
  std::vector<UtilityFn> profile{UtilityFn::quadratic(1.0, 0.1), UtilityFn::quadratic(2.0, 0.1)};
  Device d("p", 0.0, 30.0, profile[0], profile);
  EXPECT_DOUBLE_EQ(d.response(0.5, 0), 5.0);
  EXPECT_DOUBLE_EQ(d.response(0.5, 1), 15.0);
  EXPECT_DOUBLE_EQ(d.response(0.5, 2), 5.0);
}

TEST(Device, RejectsBadBounds) {
  EXPECT_THROW(quad("a", 1.0, 0.1, 3.0, 2.0), Error);
  EXPECT_THROW(quad("a", 1.0, 0.1, -1.0, 2.0), Error);
  EXPECT_THROW(UtilityFn::quadratic(1.0, -0.1), Error);
}
