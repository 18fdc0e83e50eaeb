#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "analysis.hpp"

namespace nemx {

// Stage reward plus the salvage value of the storage action:
// U(d) - P(1'd + e - g) + gamma*(tau*[e]+ - [e]-/rho).
double stage_objective(const StageConfig& stage, std::span<const double> d,
                       double e, double g);

namespace detail {
// Max-plus convolution of per-device utility tables over a shared grid step.
struct UtilityTable {
  std::vector<double> best;                      // best utility per index sum
  std::vector<std::vector<std::size_t>> choice;  // per-device backpointers
  double base = 0.0;                             // sum of grid origins
};
}  // namespace detail

struct OracleResult {
  std::vector<double> d;
  double e = 0.0;
  double objective = 0.0;
  double resolution = 0.0;  // fine grid step
};

inline constexpr std::size_t kOracleMaxDevices = 4;
inline constexpr std::size_t kOracleMaxPoints = 100001;  // per axis, coarse
inline constexpr int kOracleRefineFactor = 10;
inline constexpr int kOracleRefineWindow = 2;  // coarse steps each side

// Exhaustive grid maximizer of the stage objective. The coarse grid has step
// 10*resolution; the best coarse point is refined on the resolution grid over
// a +-2 coarse-step box. The sum over devices is enumerated by max-plus
// convolution of per-device utility tables, which visits the same points as
// the full Cartesian grid. Grids are anchored at d_min and at e = 0. Ties go
// to smaller |e|, then smaller total consumption.
class StageOracle {
 public:
  StageOracle(StageConfig stage, double resolution);

  OracleResult solve(double g) const;

  const StageConfig& stage() const { return stage_; }
  double resolution() const { return resolution_; }

 private:
  StageConfig stage_;
  double resolution_;
  double coarse_;
  detail::UtilityTable coarse_table_;
};

OracleResult stage_optimum(double g, const StageConfig& stage, double resolution);

struct CertifySample {
  double g = 0.0;
  double policy_objective = 0.0;
  double oracle_objective = 0.0;
  double relative_gap = 0.0;  // (oracle - policy) / max(1, |oracle|)
  double distance = 0.0;      // max-norm distance between (d, e) points
};

struct CertifyReport {
  std::vector<CertifySample> samples;
  double max_gap = 0.0;
  double max_distance = 0.0;
  double resolution = 0.0;
  double gap_tolerance = 1e-4;
  double distance_tolerance = 0.0;  // 2 * resolution
  bool pass = true;
};

CertifyReport certify(const StageConfig& stage, std::span<const double> g_samples,
                      double resolution);

// g values spread over every nonempty policy range (stratified, seeded).
std::vector<double> certification_samples(const StageConfig& stage,
                                          std::size_t count, std::uint64_t seed);

}  // namespace nemx
