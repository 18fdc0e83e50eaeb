#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "policy.hpp"

namespace nemx {

// One interval's decision inputs.
struct StageConfig {
  std::vector<Device> devices;
  NemRate rate;
  Battery battery;
  std::size_t t = 0;
};

struct ZoneReport {
  ProsumerType type = ProsumerType::kActiveSdg;
  double g_lo = 0.0;  // may be negative; generation itself is >= 0
  double g_hi = 0.0;
  double length = 0.0;
};

// Net-zero generation interval of a solar/solar+storage prosumer type.
ZoneReport net_zero_zone(ProsumerType type, const StageConfig& stage);

struct ZoneSweep {
  double max_abs_z_inside = 0.0;
  double min_abs_z_outside = 0.0;
  std::size_t inside_samples = 0;
  std::size_t outside_samples = 0;
};

// Evaluates the type's policy on `samples` points inside the reported zone
// and `samples` points outside it (within [0, g_hi + span]).
ZoneSweep sweep_zone(const ZoneReport& zone, const StageConfig& stage,
                     std::size_t samples = 512);

// Net-zero zones of the four solar types side by side. When the
// flexibility span f(export) - f(buy) is at most the storage span
// e_chg + e_dis, storage widens the zone more than flexibility does.
struct ZoneComparison {
  std::array<ZoneReport, 4> zones;  // passive DG, active DG, passive SDG, active SDG
  double identity_residual = 0.0;   // |active SDG| - |active DG| - |passive SDG|
  bool storage_span_dominates = false;
  bool ordering_holds = false;
};

ZoneComparison compare_zones(const StageConfig& stage);

enum class Quantity { kConsumption, kStorage, kPayment, kSurplus };
enum class Parameter { kGeneration, kBuyRate, kExportRate, kSalvage, kFixedCharge };
enum class Sign { kIncreasing, kDecreasing, kUnchanged, kIndeterminate };

std::string_view quantity_name(Quantity q);
std::string_view parameter_name(Parameter p);
std::string_view sign_name(Sign s);

inline constexpr Quantity kQuantities[] = {Quantity::kConsumption, Quantity::kStorage,
                                           Quantity::kPayment, Quantity::kSurplus};
inline constexpr Zone kZones[] = {Zone::kNetConsumption, Zone::kNetProduction,
                                  Zone::kNetZero};
inline constexpr Parameter kParameters[] = {
    Parameter::kGeneration, Parameter::kBuyRate, Parameter::kExportRate,
    Parameter::kSalvage, Parameter::kFixedCharge};

// Published comparative-statics table; kIndeterminate marks the one cell
// (payment, zone +, buy rate) with no determinate sign.
Sign expected_sign(Quantity q, Zone zone, Parameter p);

struct StaticsReport {
  Quantity quantity = Quantity::kConsumption;
  Zone zone = Zone::kNetZero;
  Parameter parameter = Parameter::kGeneration;
  Sign observed = Sign::kIndeterminate;
  Sign expected = Sign::kIndeterminate;
  bool determinate = true;  // false for the indeterminate cell
  bool pass = true;         // observed == expected where determinate
  double epsilon = 0.0;     // smallest perturbation used
  std::vector<double> probe_points;
};

inline constexpr double kUnchangedTolerance = 1e-12;
inline constexpr double kProbeEpsilon = 1e-4;
inline constexpr int kProbeHalvings = 20;

// Sign of the change in `quantity` under an epsilon-increase of `parameter`
// at interior points of `zone`. The net-zero zone is probed at the midpoint
// of each of its nonempty policy ranges and the signs are combined.
StaticsReport statics_probe(Quantity quantity, Zone zone, Parameter parameter,
                            const StageConfig& stage,
                            double epsilon = kProbeEpsilon);

std::vector<StaticsReport> statics_table(const StageConfig& stage);

// 1 - sum([z]-) / sum(g), clamped to [0,1].
double self_consumption(std::span<const double> z_trace,
                        std::span<const double> g_trace);

// Percentage gain of candidate over a positive benchmark.
double surplus_gain(double candidate, double benchmark);

}  // namespace nemx
