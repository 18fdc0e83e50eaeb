#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "demand.hpp"
#include "policy.hpp"
#include "storage.hpp"
#include "tariff.hpp"
#include "traces.hpp"

namespace nemx {

struct Scenario {
  Traces traces;
  TariffSchedule tariff;
  std::vector<Device> devices;
  Battery battery;
  ProsumerType type = ProsumerType::kActiveSdg;
  // Salvage set to the sandwich midpoint whenever rates or efficiencies are
  // changed by a sweep.
  bool auto_salvage = false;
};

struct SimTotals {
  double utility = 0.0;
  double payment = 0.0;
  double salvage = 0.0;  // gamma * (s_T - s_0)
  double surplus = 0.0;  // utility - payment + salvage
  double imports = 0.0;
  double exports = 0.0;
  double generation = 0.0;
};

struct SimReport {
  ProsumerType type = ProsumerType::kActiveSdg;
  std::size_t horizon = 0;
  std::size_t devices = 0;
  // Per-interval series; device_d is row-major horizon x devices. Only
  // net is kept when intervals are not recorded.
  std::vector<double> device_d;
  std::vector<double> consumption;
  std::vector<double> storage;
  std::vector<double> net;
  std::vector<double> utility;
  std::vector<double> soc;  // horizon + 1 entries
  std::vector<int> regime;  // -1 outside the storage policy
  std::vector<unsigned char> clipped;

  std::vector<double> bills;  // per netting window
  SimTotals totals;
  double days = 0.0;
  double daily_surplus = 0.0;
  std::optional<double> self_consumption;  // empty without generation
  std::size_t clip_events = 0;
  bool sandwich_ok = true;
  std::size_t straddling_windows = 0;
  std::vector<std::string> warnings;
};

struct SimOptions {
  bool record_intervals = true;
};

void validate_scenario(const Scenario& scenario);

SimReport run(const Scenario& scenario, const SimOptions& options = {});

// Fixed demand of passive types and the consumer at interval t: the
// baseline clamped to what the devices can absorb.
double passive_demand(const Scenario& scenario, std::size_t t);

// Copy of the battery with power limits set from a kW rating.
Battery with_power_rating(const Battery& battery, double kw,
                          double interval_hours);

struct ComparisonRow {
  std::size_t netting_intervals = 1;
  double storage_kw = 0.0;
  ProsumerType type = ProsumerType::kConsumer;
  double daily_surplus = 0.0;
  std::optional<double> gain_pct;  // vs consumer, same netting
  std::optional<double> self_consumption;
  std::size_t clip_events = 0;
};

struct CompareOptions {
  std::vector<std::size_t> netting{1, 60};
  std::vector<double> storage_kw{0.5, 0.75, 1.0};
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;  // netting-major, then rating, then type

  const ComparisonRow* find(std::size_t netting, double storage_kw,
                            ProsumerType type) const;
  std::string to_csv() const;
};

ComparisonTable compare_customers(const Scenario& base,
                                  const CompareOptions& options = {});

enum class SweepParameter { kExportRate, kEfficiency };
std::string_view sweep_parameter_name(SweepParameter p);

// SDG type vs DG type, in this order:
// active/active, active/passive, passive/active, passive/passive.
inline constexpr std::array<std::pair<ProsumerType, ProsumerType>, 4> kPairings{{
    {ProsumerType::kActiveSdg, ProsumerType::kActiveDg},
    {ProsumerType::kActiveSdg, ProsumerType::kPassiveDg},
    {ProsumerType::kPassiveSdg, ProsumerType::kActiveDg},
    {ProsumerType::kPassiveSdg, ProsumerType::kPassiveDg},
}};

struct SweepRow {
  double value = 0.0;
  bool skipped = false;
  std::string reason;
  double salvage = 0.0;
  std::array<double, 4> vos_daily{};            // $/day, SDG minus DG
  std::array<std::optional<double>, 4> vos_pct{};  // % gain of SDG over DG
};

struct SweepTable {
  SweepParameter parameter = SweepParameter::kExportRate;
  std::vector<SweepRow> rows;

  std::string to_csv() const;
};

// Value of storage across an export-rate or efficiency (tau = rho) grid.
// Grid points where the sandwich fails are skipped and flagged.
SweepTable value_of_storage_sweep(const Scenario& base, SweepParameter parameter,
                                  const std::vector<double>& grid);

}  // namespace nemx
