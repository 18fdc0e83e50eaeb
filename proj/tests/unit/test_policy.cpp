#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "error.hpp"
#include "generators.hpp"
#include "policy.hpp"
#include "rng.hpp"

using namespace nemx;

namespace {

// One device with L(d) = 1 - 0.1 d on [0, 10]; tau*gamma = 0.2, gamma/rho = 0.3.
struct Worked {
  std::vector<Device> devices{Device("load", 0.0, 10.0, UtilityFn::quadratic(1.0, 0.1))};
  NemRate rate = NemRate::make(0.5, 0.1);
  Battery battery =
      Battery::make(2.0, 2.0, 0.8, 0.8333333333333334, 0.0, 13.5, 6.75, 0.25);
};

}  // namespace

TEST(Thresholds, WorkedExample) {
  Worked w;
  Thresholds th = thresholds(w.devices, w.rate, w.battery, 0);
  const double expected[] = {3.0, 5.0, 7.0, 8.0, 10.0, 11.0};
  auto got = th.as_array();
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(got[i], expected[i], 1e-9) << i;
}

TEST(Thresholds, RequireSandwich) {
  Worked w;
  w.rate = NemRate::make(0.5, 0.25);
  try {
    thresholds(w.devices, w.rate, w.battery, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSandwich);
  }
  EXPECT_NO_THROW(compute_thresholds(w.devices, w.rate, w.battery, 0));
}

TEST(Thresholds, OrderedForRandomStages) {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    StageConfig s = nemx::testing::random_stage(rng);
    auto th = thresholds(s.devices, s.rate, s.battery, 0).as_array();
    for (int k = 0; k + 1 < 6; ++k) EXPECT_LE(th[k], th[k + 1] + 1e-12);
  }
}

TEST(Decide, WorkedExamples) {
  Worked w;
  Decision low = decide(0.0, w.devices, w.rate, w.battery, 0);
  EXPECT_NEAR(low.d[0], 5.0, 1e-9);
  EXPECT_NEAR(low.e, -2.0, 1e-12);
  EXPECT_NEAR(low.z, 3.0, 1e-9);
  EXPECT_EQ(low.zone, Zone::kNetConsumption);
  EXPECT_EQ(*low.regime, Regime::kImport);

  Decision mid = decide(7.5, w.devices, w.rate, w.battery, 0);
  EXPECT_NEAR(mid.d[0], 7.5, 1e-9);
  EXPECT_NEAR(mid.e, 0.0, 1e-12);
  EXPECT_NEAR(mid.z, 0.0, 1e-9);
  EXPECT_EQ(mid.zone, Zone::kNetZero);
  EXPECT_EQ(*mid.regime, Regime::kSelfSupply);

  Decision high = decide(12.0, w.devices, w.rate, w.battery, 0);
  EXPECT_NEAR(high.d[0], 9.0, 1e-9);
  EXPECT_NEAR(high.e, 2.0, 1e-12);
  EXPECT_NEAR(high.z, -1.0, 1e-9);
  EXPECT_EQ(high.zone, Zone::kNetProduction);
}

TEST(Decide, EveryRegimeOnWorkedExample) {
  Worked w;
  struct Case { double g; Regime r; double d; double e; };
  const Case cases[] = {
      {2.0, Regime::kImport, 5.0, -2.0},
      {4.0, Regime::kDischargeTracking, 6.0, -2.0},
      {6.0, Regime::kDischargeBalance, 7.0, -1.0},
      {7.5, Regime::kSelfSupply, 7.5, 0.0},
      {9.0, Regime::kChargeBalance, 8.0, 1.0},
      {10.5, Regime::kChargeTracking, 8.5, 2.0},
      {12.0, Regime::kExport, 9.0, 2.0},
  };
  for (const Case& c : cases) {
    Decision dec = decide(c.g, w.devices, w.rate, w.battery, 0);
    EXPECT_EQ(*dec.regime, c.r) << c.g;
    EXPECT_NEAR(dec.d[0], c.d, 1e-9) << c.g;
    EXPECT_NEAR(dec.e, c.e, 1e-9) << c.g;
  }
}

TEST(Decide, BoundaryBelongsToLowerRegime) {
  Worked w;
  Thresholds th = thresholds(w.devices, w.rate, w.battery, 0);
  EXPECT_EQ(regime_of(th.delta_plus, th), Regime::kImport);
  EXPECT_EQ(regime_of(th.delta_minus, th), Regime::kChargeTracking);
  EXPECT_EQ(regime_of(std::nextafter(th.delta_minus, 1e9), th), Regime::kExport);
}

TEST(Decide, ContinuousAcrossThresholds) {
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    StageConfig s = nemx::testing::random_stage(rng);
    Thresholds th = thresholds(s.devices, s.rate, s.battery, 0);
    for (double b : th.as_array()) {
      if (b <= 1e-6) continue;
      Decision lo = decide(b, s.devices, s.rate, s.battery, 0, th);
      Decision hi = decide(b + 1e-9, s.devices, s.rate, s.battery, 0, th);
      EXPECT_NEAR(lo.e, hi.e, 1e-6);
      for (std::size_t k = 0; k < lo.d.size(); ++k) EXPECT_NEAR(lo.d[k], hi.d[k], 1e-6);
    }
  }
}

TEST(Decide, NetConsumptionMonotoneInGeneration) {
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    StageConfig s = nemx::testing::random_stage(rng);
    Thresholds th = thresholds(s.devices, s.rate, s.battery, 0);
    double top = th.delta_minus + 2.0;
    double prev_z = 1e300;
    double prev_e = -1e300;
    for (int k = 0; k <= 200; ++k) {
      double g = top * k / 200.0;
      Decision dec = decide(g, s.devices, s.rate, s.battery, 0, th);
      EXPECT_LE(dec.z, prev_z + 1e-9);
      EXPECT_GE(dec.e, prev_e - 1e-9);
      EXPECT_GE(dec.e, -s.battery.discharge_limit - 1e-12);
      EXPECT_LE(dec.e, s.battery.charge_limit + 1e-12);
      prev_z = dec.z;
      prev_e = dec.e;
    }
  }
}

TEST(Decide, NegativeGenerationRejected) {
  Worked w;
  EXPECT_THROW(decide(-0.1, w.devices, w.rate, w.battery, 0), Error);
}

TEST(Rank, ClassesByMarginalAtMinimum) {
  Worked w;
  std::vector<Device> devs{
      Device("eager", 0.0, 10.0, UtilityFn::quadratic(1.2, 0.1)),
      Device("flex", 0.0, 10.0, UtilityFn::quadratic(0.25, 0.1)),
      Device("idle", 0.0, 10.0, UtilityFn::quadratic(0.05, 0.1)),
  };
  auto ranks = priority_rank(devs, w.rate, w.battery, 0);
  ASSERT_EQ(ranks.size(), 3u);
  EXPECT_EQ(ranks[0].cls, 1);
  EXPECT_EQ(ranks[0].activation, "always");
  EXPECT_EQ(ranks[1].cls, 3);
  EXPECT_EQ(ranks[1].activation, "sigma_plus_o");
  EXPECT_EQ(ranks[2].cls, 5);
  EXPECT_EQ(ranks[2].activation, "never");
}

TEST(Rank, AllFiveClasses) {
  Worked w;
  // L(d_min) = 0.8, 0.4, 0.25, 0.15, 0.1: the last ties the export rate.
  std::vector<Device> devs;
  for (double a : {0.8, 0.4, 0.25, 0.15, 0.1})
    devs.emplace_back("a" + std::to_string(a), 0.0, 5.0, UtilityFn::quadratic(a, 0.1));
  auto ranks = priority_rank(devs, w.rate, w.battery, 0);
  for (int k = 0; k < 5; ++k) EXPECT_EQ(ranks[k].cls, k + 1);
  EXPECT_TRUE(ranks[1].onset.has_value());
}

TEST(Rank, DeviceStartsConsumingAtOnset) {
  Worked w;
  std::vector<Device> devs{
      Device("base", 0.0, 10.0, UtilityFn::quadratic(1.0, 0.1)),
      Device("late", 0.0, 10.0, UtilityFn::quadratic(0.25, 0.1)),
  };
  auto ranks = priority_rank(devs, w.rate, w.battery, 0);
  ASSERT_EQ(ranks[1].cls, 3);
  double onset = *ranks[1].onset;
  Decision before = decide(onset - 0.01, devs, w.rate, w.battery, 0);
  Decision after = decide(onset + 0.01, devs, w.rate, w.battery, 0);
  EXPECT_NEAR(before.d[1], 0.0, 1e-9);
  EXPECT_GT(after.d[1], 0.0);
}

TEST(Passive, StorageAbsorbsResidual) {
  Battery b = Battery::make(2.0, 2.0, 0.9, 0.9, 0.0, 10.0, 5.0, 0.2);
  Decision a = passive_decide(0.0, 5.0, b);
  EXPECT_DOUBLE_EQ(a.e, -2.0);
  EXPECT_DOUBLE_EQ(a.z, 3.0);
  Decision c = passive_decide(6.0, 5.0, b);
  EXPECT_DOUBLE_EQ(c.e, 1.0);
  EXPECT_DOUBLE_EQ(c.z, 0.0);
  EXPECT_EQ(c.zone, Zone::kNetZero);
  Decision d = passive_decide(10.0, 5.0, b);
  EXPECT_DOUBLE_EQ(d.e, 2.0);
  EXPECT_DOUBLE_EQ(d.z, -3.0);
}

TEST(Passive, DgHasNoStorage) {
  Decision a = passive_dg_decide(3.0, 5.0);
  EXPECT_DOUBLE_EQ(a.e, 0.0);
  EXPECT_DOUBLE_EQ(a.z, 2.0);
}

TEST(ActiveDg, ConsumesGenerationInsideBand) {
  Worked w;
  Decision low = active_dg_decide(2.0, w.devices, w.rate, 0);
  EXPECT_NEAR(low.d[0], 5.0, 1e-9);
  EXPECT_NEAR(low.z, 3.0, 1e-9);
  Decision mid = active_dg_decide(7.0, w.devices, w.rate, 0);
  EXPECT_NEAR(mid.d[0], 7.0, 1e-9);
  EXPECT_NEAR(mid.z, 0.0, 1e-9);
  Decision high = active_dg_decide(12.0, w.devices, w.rate, 0);
  EXPECT_NEAR(high.d[0], 9.0, 1e-9);
  EXPECT_NEAR(high.z, -3.0, 1e-9);
}

TEST(DecideAs, ConsumerIgnoresGeneration) {
  Worked w;
  Decision a = decide_as(ProsumerType::kConsumer, 8.0, w.devices, w.rate, w.battery, 0);
  EXPECT_NEAR(a.z, 5.0, 1e-9);
  EXPECT_NEAR(a.payment, 2.5, 1e-9);
  EXPECT_TRUE(a.priced);
}

TEST(DecideAs, ActiveSdgDominatesOtherTypes) {
  Rng rng(19);
  for (int i = 0; i < 200; ++i) {
    StageConfig s = nemx::testing::random_stage(rng);
    Thresholds th = thresholds(s.devices, s.rate, s.battery, 0);
    for (int k = 0; k <= 20; ++k) {
      double g = (th.delta_minus + 1.0) * k / 20.0;
      auto objective = [&](ProsumerType type) {
        Decision d = decide_as(type, g, s.devices, s.rate, s.battery, 0);
        return d.surplus + s.battery.salvage_increment(d.e);
      };
      double best = objective(ProsumerType::kActiveSdg);
      for (ProsumerType other : {ProsumerType::kPassiveDg, ProsumerType::kActiveDg,
                                 ProsumerType::kPassiveSdg})
        EXPECT_GE(best, objective(other) - 1e-9);
      EXPECT_GE(objective(ProsumerType::kActiveDg),
                objective(ProsumerType::kPassiveDg) - 1e-9);
    }
  }
}

TEST(ProsumerType, NamesRoundTrip) {
  for (ProsumerType t : {ProsumerType::kConsumer, ProsumerType::kPassiveDg,
                         ProsumerType::kActiveDg, ProsumerType::kPassiveSdg,
                         ProsumerType::kActiveSdg})
    EXPECT_EQ(parse_type(type_name(t)), t);
  EXPECT_FALSE(parse_type("prosumer").has_value());
}
