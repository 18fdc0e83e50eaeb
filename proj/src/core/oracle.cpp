#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"
#include "rng.hpp"

namespace nemx {

double stage_objective(const StageConfig& stage, std::span<const double> d,
                       double e, double g) {
  double total = 0.0;
  double utility = 0.0;
  for (std::size_t k = 0; k < stage.devices.size(); ++k) {
    total += d[k];
    utility += stage.devices[k].utility_value(d[k], stage.t);
  }
  return utility - payment(stage.rate, total + e - g) +
         stage.battery.salvage_increment(e);
}

namespace {

struct Axis {
  double start = 0.0;
  std::size_t count = 0;
};

using Convolution = detail::UtilityTable;

std::size_t steps_within(double range, double step) {
  return static_cast<std::size_t>(std::floor(range / step + 1e-9));
}

Convolution convolve(const StageConfig& stage, const std::vector<Axis>& axes,
                     double step) {
  Convolution out;
  out.best = {0.0};
  out.choice.resize(axes.size());
  for (std::size_t k = 0; k < axes.size(); ++k) {
    const Device& dev = stage.devices[k];
    std::vector<double> table(axes[k].count);
    for (std::size_t i = 0; i < table.size(); ++i)
      table[i] = dev.utility_value(axes[k].start + step * static_cast<double>(i), stage.t);
    out.base += axes[k].start;
    std::vector<double> next(out.best.size() + table.size() - 1,
                             -std::numeric_limits<double>::infinity());
    std::vector<std::size_t> pick(next.size(), 0);
    for (std::size_t prev = 0; prev < out.best.size(); ++prev) {
      for (std::size_t i = 0; i < table.size(); ++i) {
        double v = out.best[prev] + table[i];
        if (v > next[prev + i]) {
          next[prev + i] = v;
          pick[prev + i] = i;
        }
      }
    }
    out.best = std::move(next);
    out.choice[k] = std::move(pick);
  }
  return out;
}

struct Best {
  double objective = -std::numeric_limits<double>::infinity();
  double e = 0.0;
  double total = 0.0;
  std::size_t index = 0;  // sum index into the convolution
  long e_index = 0;
  bool found = false;
};

// Search the convolution table against e = step * j for j in [j_lo, j_hi].
Best search(const StageConfig& stage, const Convolution& conv, double step,
            long j_lo, long j_hi, double g) {
  Best best;
  for (std::size_t idx = 0; idx < conv.best.size(); ++idx) {
    const double total = conv.base + step * static_cast<double>(idx);
    const double utility = conv.best[idx];
    for (long j = j_lo; j <= j_hi; ++j) {
      const double e = step * static_cast<double>(j);
      const double obj = utility - payment(stage.rate, total + e - g) +
                         stage.battery.salvage_increment(e);
      bool take = false;
      if (!best.found) {
        take = true;
      } else {
        double tol = 1e-12 * std::max(1.0, std::abs(best.objective));
        if (obj > best.objective + tol) {
          take = true;
        } else if (obj >= best.objective - tol) {
          if (std::abs(e) < std::abs(best.e)) take = true;
          else if (std::abs(e) == std::abs(best.e) && total < best.total) take = true;
        }
      }
      if (take) best = {obj, e, total, idx, j, true};
    }
  }
  return best;
}

std::vector<std::size_t> backtrack(const Convolution& conv, std::size_t index) {
  std::vector<std::size_t> picks(conv.choice.size(), 0);
  for (std::size_t k = conv.choice.size(); k-- > 0;) {
    picks[k] = conv.choice[k][index];
    index -= picks[k];
  }
  return picks;
}

}  // namespace

StageOracle::StageOracle(StageConfig stage, double resolution)
    : stage_(std::move(stage)),
      resolution_(resolution),
      coarse_(resolution * kOracleRefineFactor) {
  if (!(resolution > 0.0) || !std::isfinite(resolution))
    fail(ErrorCode::kInvalidArgument, "oracle resolution must be positive");
  if (stage_.devices.size() > kOracleMaxDevices)
    fail(ErrorCode::kOracleScale, "oracle supports at most " +
                                      std::to_string(kOracleMaxDevices) + " devices");
  std::vector<Axis> axes;
  for (const Device& dev : stage_.devices) {
    std::size_t steps = steps_within(dev.d_max() - dev.d_min(), coarse_);
    if (steps + 1 > kOracleMaxPoints)
      fail(ErrorCode::kOracleScale, "device '" + dev.id() + "' range too large for the oracle grid");
    axes.push_back({dev.d_min(), steps + 1});
  }
  const Battery& bat = stage_.battery;
  if (steps_within(bat.charge_limit, coarse_) + steps_within(bat.discharge_limit, coarse_) + 1 >
      2 * kOracleMaxPoints)
    fail(ErrorCode::kOracleScale, "storage range too large for the oracle grid");
  coarse_table_ = convolve(stage_, axes, coarse_);
}

OracleResult StageOracle::solve(double g) const {
  if (!(g >= 0.0)) fail(ErrorCode::kDomain, "generation must be nonnegative");
  const Battery& bat = stage_.battery;
  const std::size_t K = stage_.devices.size();

  const Convolution& coarse = coarse_table_;
  const long je_lo = -static_cast<long>(steps_within(bat.discharge_limit, coarse_));
  const long je_hi = static_cast<long>(steps_within(bat.charge_limit, coarse_));
  const Best rough = search(stage_, coarse, coarse_, je_lo, je_hi, g);
  const std::vector<std::size_t> rough_picks = backtrack(coarse, rough.index);

  // Refine on the fine grid around the coarse optimum.
  const long window = static_cast<long>(kOracleRefineWindow) * kOracleRefineFactor;
  std::vector<Axis> axes;
  for (std::size_t k = 0; k < K; ++k) {
    const Device& dev = stage_.devices[k];
    long top = static_cast<long>(steps_within(dev.d_max() - dev.d_min(), resolution_));
    long center = static_cast<long>(rough_picks[k]) * kOracleRefineFactor;
    long lo = std::max(0L, center - window);
    long hi = std::min(top, center + window);
    axes.push_back({dev.d_min() + resolution_ * static_cast<double>(lo),
                    static_cast<std::size_t>(hi - lo + 1)});
  }
  const long fine_lo = -static_cast<long>(steps_within(bat.discharge_limit, resolution_));
  const long fine_hi = static_cast<long>(steps_within(bat.charge_limit, resolution_));
  const long e_center = rough.e_index * kOracleRefineFactor;
  Convolution fine = convolve(stage_, axes, resolution_);
  const Best sharp = search(stage_, fine, resolution_, std::max(fine_lo, e_center - window),
                            std::min(fine_hi, e_center + window), g);
  const std::vector<std::size_t> picks = backtrack(fine, sharp.index);

  OracleResult out;
  out.d.resize(K);
  for (std::size_t k = 0; k < K; ++k)
    out.d[k] = axes[k].start + resolution_ * static_cast<double>(picks[k]);
  out.e = sharp.e;
  out.objective = stage_objective(stage_, out.d, out.e, g);
  out.resolution = resolution_;
  return out;
}

OracleResult stage_optimum(double g, const StageConfig& stage, double resolution) {
  return StageOracle(stage, resolution).solve(g);
}

CertifyReport certify(const StageConfig& stage, std::span<const double> g_samples,
                      double resolution) {
  StageOracle oracle(stage, resolution);
  const Thresholds th = thresholds(stage.devices, stage.rate, stage.battery, stage.t);
  CertifyReport report;
  report.resolution = resolution;
  report.distance_tolerance = 2.0 * resolution;
  for (double g : g_samples) {
    const Decision dec = decide(g, stage.devices, stage.rate, stage.battery, stage.t, th);
    const OracleResult best = oracle.solve(g);
    CertifySample s;
    s.g = g;
    s.policy_objective = dec.surplus + stage.battery.salvage_increment(dec.e);
    s.oracle_objective = best.objective;
    s.relative_gap = (best.objective - s.policy_objective) /
                     std::max(1.0, std::abs(best.objective));
    s.distance = std::abs(dec.e - best.e);
    for (std::size_t k = 0; k < dec.d.size(); ++k)
      s.distance = std::max(s.distance, std::abs(dec.d[k] - best.d[k]));
    report.max_gap = std::max(report.max_gap, s.relative_gap);
    report.max_distance = std::max(report.max_distance, s.distance);
    report.samples.push_back(s);
  }
  report.pass = report.max_gap <= report.gap_tolerance &&
                report.max_distance <= report.distance_tolerance;
  return report;
}

std::vector<double> certification_samples(const StageConfig& stage,
                                          std::size_t count, std::uint64_t seed) {
  const Thresholds th = thresholds(stage.devices, stage.rate, stage.battery, stage.t);
  std::vector<std::pair<double, double>> ranges;
  auto b = th.as_array();
  if (b[0] > 0.0) ranges.emplace_back(0.0, b[0]);
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    double lo = std::max(0.0, b[i]);
    if (b[i + 1] > lo) ranges.emplace_back(lo, b[i + 1]);
  }
  double top = std::max(0.0, b[5]);
  ranges.emplace_back(top, top + std::max(1.0, 0.5 * top));

  Rng rng(seed);
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& [lo, hi] = ranges[i % ranges.size()];
    double u = 0.0;
    do u = rng.uniform(); while (u <= 0.0);
    out.push_back(lo + (hi - lo) * u);
  }
  return out;
}

}  // namespace nemx
