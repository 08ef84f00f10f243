#include "contrain/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace contrain {

void LearningCurve::validate() const {
  if (iters.empty() || iters.size() != acc.size()) {
    throw std::invalid_argument("LearningCurve: empty or misaligned");
  }
  for (std::size_t i = 1; i < iters.size(); ++i) {
    if (iters[i] <= iters[i - 1]) {
      throw std::invalid_argument("LearningCurve: iterations must be strictly increasing");
    }
  }
  for (double a : acc) {
    if (a < 0.0 || a > 1.0) throw std::invalid_argument("LearningCurve: accuracy outside [0,1]");
  }
}

double LearningCurve::final_acc() const { return acc.back(); }
double LearningCurve::max_acc() const { return *std::max_element(acc.begin(), acc.end()); }

LearningCurve curve_of(const RunRecord& record) {
  LearningCurve c{record.eval_iters, record.test_accuracy};
  c.validate();
  return c;
}

std::optional<std::int64_t> speed(const LearningCurve& curve, double target) {
  curve.validate();
  if (target < 0.0 || target > 1.0) throw std::invalid_argument("speed: target outside [0,1]");
  for (std::size_t i = 0; i < curve.iters.size(); ++i) {
    if (curve.acc[i] >= target) return curve.iters[i];
  }
  return std::nullopt;
}

std::optional<double> relative_speedup(const LearningCurve& curve_f,
                                       const LearningCurve& scratch_curve,
                                       double a_scratch, double r_percent) {
  if (r_percent <= 0.0 || r_percent > 100.0) {
    throw std::invalid_argument("relative_speedup: r must be in (0, 100]");
  }
  const auto s_scratch = speed(scratch_curve, a_scratch);
  const auto s_f = speed(curve_f, r_percent / 100.0 * a_scratch);
  if (!s_scratch || !s_f) return std::nullopt;
  if (*s_f == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(*s_scratch) / static_cast<double>(*s_f);
}

std::string target_mode_name(TargetMode m) {
  return m == TargetMode::final_acc ? "final" : "max";
}

TargetMode target_mode_from_name(const std::string& s) {
  if (s == "final") return TargetMode::final_acc;
  if (s == "max") return TargetMode::max_acc;
  throw std::invalid_argument("unknown target mode: " + s);
}

namespace {

// Seed-mean curve and standard error on a shared eval grid.
void mean_and_stderr(const std::vector<RunRecord>& records, LearningCurve& mean,
                     std::vector<double>& std_error) {
  if (records.empty()) throw std::invalid_argument("aggregate: arm with no records");
  const auto& grid = records.front().eval_iters;
  for (const RunRecord& r : records) {
    if (r.eval_iters != grid) {
      throw std::invalid_argument("aggregate: mismatched eval grids for arm " + r.arm);
    }
  }
  const std::size_t n = records.size();
  const std::size_t points = grid.size();
  mean.iters = grid;
  mean.acc.assign(points, 0.0);
  std_error.assign(points, 0.0);
  for (std::size_t p = 0; p < points; ++p) {
    double sum = 0.0;
    for (const RunRecord& r : records) sum += r.test_accuracy[p];
    const double mu = sum / static_cast<double>(n);
    mean.acc[p] = mu;
    if (n > 1) {
      double sq = 0.0;
      for (const RunRecord& r : records) {
        const double d = r.test_accuracy[p] - mu;
        sq += d * d;
      }
      std_error[p] = std::sqrt(sq / static_cast<double>(n - 1)) /
                     std::sqrt(static_cast<double>(n));
    }
  }
  mean.validate();
}

}  // namespace

SpeedReport aggregate(const std::map<std::string, std::vector<RunRecord>>& records_by_arm,
                      const std::string& scratch_arm, const std::vector<int>& r_list,
                      TargetMode mode) {
  if (records_by_arm.empty()) throw std::invalid_argument("aggregate: no records");
  const auto scratch_it = records_by_arm.find(scratch_arm);
  if (scratch_it == records_by_arm.end()) {
    throw std::invalid_argument("aggregate: scratch arm '" + scratch_arm + "' missing");
  }

  SpeedReport report;
  report.scratch_arm = scratch_arm;
  report.target_mode = mode;
  report.r_list = r_list;

  LearningCurve scratch_mean;
  std::vector<double> scratch_err;
  mean_and_stderr(scratch_it->second, scratch_mean, scratch_err);
  report.a_scratch = mode == TargetMode::final_acc ? scratch_mean.final_acc()
                                                   : scratch_mean.max_acc();
  report.eval_cadence =
      scratch_mean.iters.size() > 1 ? scratch_mean.iters[1] - scratch_mean.iters[0] : 0;

  for (const auto& [arm, records] : records_by_arm) {
    ArmSummary summary;
    summary.arm = arm;
    summary.seed_count = records.size();
    mean_and_stderr(records, summary.mean_curve, summary.std_error);
    summary.max_acc = summary.mean_curve.max_acc();
    for (int r : r_list) {
      const double target = static_cast<double>(r) / 100.0 * report.a_scratch;
      summary.speed_at[r] = speed(summary.mean_curve, target);
      summary.l_r[r] =
          relative_speedup(summary.mean_curve, scratch_mean, report.a_scratch,
                           static_cast<double>(r));
    }
    report.arms.push_back(std::move(summary));
  }
  std::sort(report.arms.begin(), report.arms.end(),
            [](const ArmSummary& a, const ArmSummary& b) { return a.arm < b.arm; });
  return report;
}

namespace {

std::string fmt_double(double v, const char* spec) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string fmt_lr(const std::optional<double>& v) {
  if (!v) return "/";
  if (std::isinf(*v)) return "inf";
  return "x" + fmt_double(*v, "%.2f");
}

std::string fmt_speed(const std::optional<std::int64_t>& v) {
  return v ? std::to_string(*v) : "/";
}

}  // namespace

std::string report_markdown(const SpeedReport& report) {
  std::ostringstream os;
  os << "| Arm | Seeds | Max Acc |";
  for (int r : report.r_list) os << " s_" << r << " |";
  for (int r : report.r_list) os << " L_" << r << " |";
  os << "\n|---|---|---|";
  for (std::size_t i = 0; i < 2 * report.r_list.size(); ++i) os << "---|";
  os << "\n";
  for (const ArmSummary& arm : report.arms) {
    os << "| " << arm.arm << " | " << arm.seed_count << " | "
       << fmt_double(arm.max_acc, "%.4f") << " |";
    for (int r : report.r_list) os << " " << fmt_speed(arm.speed_at.at(r)) << " |";
    for (int r : report.r_list) os << " " << fmt_lr(arm.l_r.at(r)) << " |";
    os << "\n";
  }
  os << "\nScratch arm: " << report.scratch_arm << ", a_scratch = "
     << fmt_double(report.a_scratch, "%.4f") << " (" << target_mode_name(report.target_mode)
     << "), s() resolution = " << report.eval_cadence << " iterations.\n";
  return os.str();
}

std::string report_csv(const SpeedReport& report) {
  std::ostringstream os;
  os << "arm,seeds,max_acc";
  for (int r : report.r_list) os << ",s_" << r;
  for (int r : report.r_list) os << ",L_" << r;
  os << "\n";
  for (const ArmSummary& arm : report.arms) {
    os << arm.arm << "," << arm.seed_count << "," << fmt_double(arm.max_acc, "%.6f");
    for (int r : report.r_list) os << "," << fmt_speed(arm.speed_at.at(r));
    for (int r : report.r_list) {
      const auto& v = arm.l_r.at(r);
      os << "," << (v ? (std::isinf(*v) ? "inf" : fmt_double(*v, "%.6f")) : "/");
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace contrain
