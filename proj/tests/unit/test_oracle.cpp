#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "error.hpp"
#include "generators.hpp"
#include "oracle.hpp"
#include "rng.hpp"

using namespace nemx;

namespace {

// Exhaustive search over the same lattice the oracle uses.
double enumerate(const StageConfig& s, double g, double res) {
  auto count = [res](double range) {
    return static_cast<long>(std::floor(range / res + 1e-9));
  };
  const std::size_t K = s.devices.size();
  std::vector<long> tops;
  for (const Device& d : s.devices) tops.push_back(count(d.d_max() - d.d_min()));
  const long e_lo = -count(s.battery.discharge_limit);
  const long e_hi = count(s.battery.charge_limit);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<long> idx(K, 0);
  std::vector<double> d(K);
  while (true) {
    for (std::size_t k = 0; k < K; ++k) d[k] = s.devices[k].d_min() + res * idx[k];
    for (long j = e_lo; j <= e_hi; ++j)
      best = std::max(best, stage_objective(s, d, res * j, g));
    std::size_t k = 0;
    while (k < K && ++idx[k] > tops[k]) idx[k++] = 0;
    if (k == K) break;
  }
  return best;
}

StageConfig tiny_stage(Rng& rng, std::size_t max_devices) {
  nemx::testing::StageGen gen;
  gen.max_devices = max_devices;
  gen.lattice = true;
  gen.max_span = 1.0;
  gen.max_storage = 0.6;
  return nemx::testing::random_stage(rng, gen);
}

}  // namespace

TEST(Oracle, MatchesLiteralEnumeration) {
  Rng rng(37);
  const double res = 0.02;
  for (int i = 0; i < 30; ++i) {
    StageConfig s = tiny_stage(rng, 2);
    StageOracle oracle(s, res);
    for (double g : {0.0, 0.3, 0.9, 1.7, 3.0}) {
      OracleResult r = oracle.solve(g);
      EXPECT_NEAR(r.objective, enumerate(s, g, res), 1e-9) << i << " g=" << g;
    }
  }
}

TEST(Oracle, NoDevicesOnlyChoosesStorage) {
  StageConfig s;
  s.rate = NemRate::make(0.5, 0.1);
  s.battery = Battery::make(2.0, 2.0, 0.8, 0.8333333333333334, 0.0, 13.5, 6.75, 0.25);
  StageOracle oracle(s, 0.01);
  OracleResult surplus_sun = oracle.solve(3.0);
  EXPECT_TRUE(surplus_sun.d.empty());
  EXPECT_NEAR(surplus_sun.e, 2.0, 1e-12);
  OracleResult partial = oracle.solve(1.2);
  EXPECT_NEAR(partial.e, 1.2, 1e-9);
  OracleResult dark = oracle.solve(0.0);
  EXPECT_NEAR(dark.e, 0.0, 1e-12);  // discharging into zero demand only exports
  EXPECT_NEAR(enumerate(s, 1.2, 0.01), partial.objective, 1e-12);
}

TEST(Oracle, UncontrollableDeviceShiftsGeneration) {
  Rng rng(41);
  for (int i = 0; i < 20; ++i) {
    StageConfig s = tiny_stage(rng, 2);
    StageConfig with_fixed = s;
    with_fixed.devices.emplace_back("fixed", 0.5, 0.5, UtilityFn::quadratic(0.3, 1.0));
    StageOracle a(s, 0.01);
    StageOracle b(with_fixed, 0.01);
    for (double g : {0.5, 1.0, 2.5}) {
      OracleResult ra = a.solve(g - 0.5);
      OracleResult rb = b.solve(g);
      EXPECT_NEAR(ra.e, rb.e, 1e-9);
      for (std::size_t k = 0; k < ra.d.size(); ++k) EXPECT_NEAR(ra.d[k], rb.d[k], 1e-9);
      EXPECT_DOUBLE_EQ(rb.d.back(), 0.5);
    }
  }
}

TEST(Oracle, ZeroCapacityMatchesActiveDg) {
  Rng rng(43);
  for (int i = 0; i < 30; ++i) {
    StageConfig s = tiny_stage(rng, 3);
    s.battery = Battery::make(0.0, 0.0, s.battery.charge_eff, s.battery.discharge_eff, 0.0,
                              1.0, 0.5, s.battery.salvage);
    StageOracle oracle(s, 1e-3);
    for (double g : {0.0, 0.4, 1.1, 2.5}) {
      OracleResult r = oracle.solve(g);
      Decision dec = active_dg_decide(g, s.devices, s.rate, 0);
      EXPECT_DOUBLE_EQ(r.e, 0.0);
      for (std::size_t k = 0; k < r.d.size(); ++k) EXPECT_NEAR(r.d[k], dec.d[k], 2e-3);
    }
  }
}

TEST(Oracle, FinerGridNeverWorse) {
  Rng rng(47);
  for (int i = 0; i < 20; ++i) {
    StageConfig s = tiny_stage(rng, 3);
    double g = rng.uniform(0.0, 3.0);
    double prev = -std::numeric_limits<double>::infinity();
    for (double res : {0.04, 0.02, 0.01, 0.005}) {
      OracleResult r = stage_optimum(g, s, res);
      EXPECT_GE(r.objective, prev - 1e-12);
      prev = r.objective;
    }
  }
}

TEST(Oracle, CertifiesPolicyOnRandomStages) {
  Rng rng(53);
  for (int i = 0; i < 10; ++i) {
    StageConfig s = nemx::testing::random_stage(rng, {1, 3, false, 3.0, 2.0});
    auto samples = certification_samples(s, 20, 100 + i);
    CertifyReport r = certify(s, samples, 1e-3);
    EXPECT_TRUE(r.pass) << "gap " << r.max_gap << " distance " << r.max_distance;
    EXPECT_LE(r.max_gap, 1e-4);
  }
}

TEST(Oracle, SamplesCoverEveryPolicyRange) {
  StageConfig s;
  s.devices.emplace_back("load", 0.0, 10.0, UtilityFn::quadratic(1.0, 0.1));
  s.rate = NemRate::make(0.5, 0.1);
  s.battery = Battery::make(2.0, 2.0, 0.8, 0.8333333333333334, 0.0, 13.5, 6.75, 0.25);
  auto samples = certification_samples(s, 70, 42);
  Thresholds th = thresholds(s.devices, s.rate, s.battery, 0);
  std::vector<int> hits(kRegimeCount, 0);
  for (double g : samples) ++hits[static_cast<int>(regime_of(g, th))];
  for (int r = 0; r < kRegimeCount; ++r) EXPECT_EQ(hits[r], 10) << r;
  EXPECT_EQ(samples, certification_samples(s, 70, 42));
}

TEST(Oracle, RejectsOversizedProblems) {
  StageConfig s;
  s.rate = NemRate::make(0.5, 0.1);
  s.battery = Battery::make(1.0, 1.0, 0.9, 0.9, 0.0, 5.0, 1.0, 0.3);
  for (int k = 0; k < 5; ++k)
    s.devices.emplace_back("d" + std::to_string(k), 0.0, 1.0, UtilityFn::quadratic(1.0, 1.0));
  try {
    StageOracle(s, 0.01);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOracleScale);
  }
  EXPECT_THROW(StageOracle(StageConfig{}, 0.0), Error);
}
