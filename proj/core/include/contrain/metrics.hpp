#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "contrain/train.hpp"

namespace contrain {

// Combined test accuracy per recorded iteration, strictly increasing
// iteration grid.
struct LearningCurve {
  std::vector<std::int64_t> iters;
  std::vector<double> acc;

  void validate() const;
  double final_acc() const;
  double max_acc() const;
};

LearningCurve curve_of(const RunRecord& record);

// First recorded iteration whose accuracy reaches the target; nullopt when
// the target is never reached (the "/" sentinel).
std::optional<std::int64_t> speed(const LearningCurve& curve, double target);

// L_r = s(scratch, a_scratch) / s(f, r/100 * a_scratch). Unreached inputs
// propagate to an unreached output; a zero-iteration denominator yields
// +infinity.
std::optional<double> relative_speedup(const LearningCurve& curve_f,
                                       const LearningCurve& scratch_curve,
                                       double a_scratch, double r_percent);

// Which point of the scratch mean curve defines a_scratch.
enum class TargetMode { final_acc, max_acc };

std::string target_mode_name(TargetMode m);
TargetMode target_mode_from_name(const std::string& s);

struct ArmSummary {
  std::string arm;
  std::size_t seed_count = 0;
  LearningCurve mean_curve;
  std::vector<double> std_error;  // aligned with mean_curve.iters
  double max_acc = 0.0;
  // r (percent) -> value; nullopt is the "/" sentinel.
  std::map<int, std::optional<std::int64_t>> speed_at;
  std::map<int, std::optional<double>> l_r;
};

struct SpeedReport {
  std::string scratch_arm;
  double a_scratch = 0.0;
  TargetMode target_mode = TargetMode::final_acc;
  std::vector<int> r_list;
  std::int64_t eval_cadence = 0;  // s() resolution
  std::vector<ArmSummary> arms;   // sorted by arm name
};

// Seed-mean curves per arm (matching eval grids required), metrics computed
// on the mean curves, a_scratch taken from the mean scratch curve.
SpeedReport aggregate(const std::map<std::string, std::vector<RunRecord>>& records_by_arm,
                      const std::string& scratch_arm, const std::vector<int>& r_list,
                      TargetMode mode);

// Table-style renderings: columns Max Acc, then L_r per configured r.
std::string report_markdown(const SpeedReport& report);
std::string report_csv(const SpeedReport& report);

}  // namespace contrain
