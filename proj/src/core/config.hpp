#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "demand.hpp"
#include "error.hpp"
#include "policy.hpp"
#include "sim.hpp"
#include "storage.hpp"
#include "tariff.hpp"
#include "traces.hpp"

namespace nemx {

// Thrown by parse_config with every violation found, each prefixed by the
// JSON path of the offending field ("battery.charge_eff: ...").
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct VerifySettings {
  std::size_t samples = 100;
  double resolution = 1e-3;
};

struct SweepSettings {
  SweepParameter parameter = SweepParameter::kExportRate;
  std::vector<double> grid;
};

struct ScenarioConfig {
  double interval_minutes = 60.0;
  std::vector<Device> devices;
  Battery battery;
  bool has_battery = false;
  bool auto_salvage = false;
  std::optional<TariffSchedule> tariff;
  ProsumerType type = ProsumerType::kActiveSdg;
  std::optional<Traces> traces;
  std::uint64_t seed = 42;

  std::size_t analysis_t = 0;
  std::vector<double> analysis_g;  // generation values for decide
  VerifySettings verify;
  CompareOptions compare;
  std::optional<SweepSettings> sweep;

  double interval_hours() const { return interval_minutes / 60.0; }
  StageConfig stage(std::optional<std::size_t> t = std::nullopt) const;
  // Needs traces.
  Scenario scenario() const;
};

// seed_override replaces any seed in the file (synthetic traces and
// sampling); relative trace paths resolve against the config's directory.
ScenarioConfig parse_config(const std::string& path,
                            std::optional<std::uint64_t> seed_override = std::nullopt);
ScenarioConfig parse_config_text(const std::string& text, const std::string& base_dir,
                                 std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace nemx
