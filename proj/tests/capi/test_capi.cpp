#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include <nemx/nemx.h>

namespace {

std::string source(const std::string& rel) { return std::string(NEMX_SOURCE_DIR) + "/" + rel; }

// Owns a scenario handle for the duration of a test.
struct Handle {
  nemx_scenario* ptr = nullptr;
  ~Handle() { nemx_scenario_free(ptr); }
};

std::string take(char* s) {
  std::string out = s ? s : "";
  nemx_string_free(s);
  return out;
}

const char* kFlat = R"({
  "interval_minutes": 60,
  "devices": [{"id": "load", "d_min": 0, "d_max": 10, "alpha": 1.0, "beta": 0.1}],
  "tariff": {"buy": 0.5, "export": 0.1},
  "battery": {"charge_kw": 2, "discharge_kw": 2, "charge_eff": 0.8,
              "discharge_eff": 0.8333333333333334, "soc_max_kwh": 13.5, "salvage": 0.25}
})";

}  // namespace

TEST(CApi, VersionAndHelpers) {
  EXPECT_STRNE(nemx_version(), "");
  EXPECT_NEAR(nemx_payment(0.49, 0.1, 0.0, 2.0), 0.98, 1e-12);
  EXPECT_NEAR(nemx_payment(0.49, 0.1, 0.0, -3.0), -0.3, 1e-12);
  double soc = 0.0;
  ASSERT_EQ(nemx_soc_step(5.0, 2.0, 2.0, 2.0, 0.95, 0.95, &soc), NEMX_OK);
  EXPECT_NEAR(soc, 6.9, 1e-12);
  EXPECT_EQ(nemx_soc_step(5.0, 3.0, 2.0, 2.0, 0.95, 0.95, &soc), NEMX_E_DOMAIN);
  EXPECT_NE(std::string(nemx_last_error()), "");
  EXPECT_EQ(nemx_soc_step(5.0, 1.0, 2.0, 2.0, 0.95, 0.95, nullptr), NEMX_E_INVALID_ARGUMENT);
}

TEST(CApi, ThresholdsFromFile) {
  Handle h;
  ASSERT_EQ(nemx_scenario_load(source("configs/example.json").c_str(), 0, 0, &h.ptr), NEMX_OK)
      << nemx_last_error();
  EXPECT_EQ(nemx_scenario_horizon(h.ptr), 24u);
  EXPECT_EQ(nemx_scenario_seed(h.ptr), 42u);
  double th[6];
  ASSERT_EQ(nemx_thresholds(h.ptr, -1, th), NEMX_OK);
  const double expected[] = {3, 5, 7, 8, 10, 11};
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(th[i], expected[i], 1e-9);
  char* json = nullptr;
  ASSERT_EQ(nemx_thresholds_json(h.ptr, 0, &json), NEMX_OK);
  EXPECT_NE(take(json).find("delta_plus"), std::string::npos);
}

TEST(CApi, SeedOverride) {
  Handle h;
  ASSERT_EQ(nemx_scenario_parse(kFlat, ".", 1, 9, &h.ptr), NEMX_OK);
  EXPECT_EQ(nemx_scenario_seed(h.ptr), 9u);
}

TEST(CApi, DecideRankZonesStatics) {
  Handle h;
  ASSERT_EQ(nemx_scenario_parse(kFlat, ".", 0, 0, &h.ptr), NEMX_OK) << nemx_last_error();
  const double g[] = {0.0, 7.5, 12.0};
  char* out = nullptr;
  ASSERT_EQ(nemx_decide_json(h.ptr, g, 3, 0, &out), NEMX_OK);
  std::string decide = take(out);
  EXPECT_NE(decide.find("\"zone\""), std::string::npos);

  ASSERT_EQ(nemx_rank_json(h.ptr, -1, &out), NEMX_OK);
  EXPECT_NE(take(out).find("\"class\""), std::string::npos);

  int pass = 0;
  ASSERT_EQ(nemx_zones_json(h.ptr, -1, &out, &pass), NEMX_OK);
  take(out);
  EXPECT_EQ(pass, 1);

  pass = 0;
  ASSERT_EQ(nemx_statics_csv(h.ptr, -1, &out, &pass), NEMX_OK);
  std::string csv = take(out);
  EXPECT_EQ(csv.rfind("quantity,zone,parameter", 0), 0u);
  EXPECT_EQ(csv.find("FAIL"), std::string::npos);
  EXPECT_EQ(pass, 1);
}

TEST(CApi, VerifyPasses) {
  Handle h;
  ASSERT_EQ(nemx_scenario_parse(kFlat, ".", 0, 0, &h.ptr), NEMX_OK);
  char* out = nullptr;
  int pass = 0;
  ASSERT_EQ(nemx_verify_json(h.ptr, -1, 20, 1e-3, &out, &pass), NEMX_OK) << nemx_last_error();
  take(out);
  EXPECT_EQ(pass, 1);
}

TEST(CApi, SimulateCompareSweep) {
  Handle h;
  ASSERT_EQ(nemx_scenario_load(source("configs/day_csv.json").c_str(), 0, 0, &h.ptr), NEMX_OK)
      << nemx_last_error();
  char* report = nullptr;
  char* intervals = nullptr;
  ASSERT_EQ(nemx_simulate(h.ptr, &report, &intervals), NEMX_OK) << nemx_last_error();
  EXPECT_NE(take(report).find("daily_surplus"), std::string::npos);
  std::string rows = take(intervals);
  EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 97);

  ASSERT_EQ(nemx_simulate(h.ptr, &report, nullptr), NEMX_OK);
  take(report);

  char* out = nullptr;
  ASSERT_EQ(nemx_compare_csv(h.ptr, &out), NEMX_OK) << nemx_last_error();
  EXPECT_NE(take(out).find("active_sdg"), std::string::npos);
  ASSERT_EQ(nemx_sweep_csv(h.ptr, &out), NEMX_OK) << nemx_last_error();
  EXPECT_EQ(take(out).rfind("efficiency,", 0), 0u);
  ASSERT_EQ(nemx_traces_csv(h.ptr, &out), NEMX_OK);
  EXPECT_EQ(take(out).rfind("timestamp,generation_kwh,baseline_kwh", 0), 0u);
}

TEST(CApi, ErrorsCarryCodesAndMessages) {
  nemx_scenario* h = nullptr;
  EXPECT_EQ(nemx_scenario_load(source("tests/cli/bad_efficiency.json").c_str(), 0, 0, &h),
            NEMX_E_CONFIG);
  EXPECT_EQ(h, nullptr);
  EXPECT_NE(std::string(nemx_last_error()).find("charge_eff must lie in (0,1]"),
            std::string::npos);
  EXPECT_EQ(nemx_scenario_load("/nonexistent.json", 0, 0, &h), NEMX_E_IO);
  EXPECT_EQ(nemx_scenario_parse(nullptr, ".", 0, 0, &h), NEMX_E_INVALID_ARGUMENT);

  Handle flat;
  ASSERT_EQ(nemx_scenario_parse(kFlat, ".", 0, 0, &flat.ptr), NEMX_OK);
  char* out = nullptr;
  EXPECT_EQ(nemx_simulate(flat.ptr, &out, nullptr), NEMX_E_CONFIG);  // no traces
  EXPECT_EQ(out, nullptr);
  double th[6];
  EXPECT_EQ(nemx_thresholds(nullptr, 0, th), NEMX_E_INVALID_ARGUMENT);
  EXPECT_EQ(nemx_thresholds(flat.ptr, 1000, th), NEMX_E_RANGE);

  std::string tied = kFlat;
  tied.replace(tied.find("\"export\": 0.1"), 13, "\"export\": 0.3");
  Handle bad;
  ASSERT_EQ(nemx_scenario_parse(tied.c_str(), ".", 0, 0, &bad.ptr), NEMX_OK);
  EXPECT_EQ(nemx_thresholds(bad.ptr, 0, th), NEMX_E_SANDWICH);
}
