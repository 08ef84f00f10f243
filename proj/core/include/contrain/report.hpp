#pragma once

#include <string>
#include <vector>

#include "contrain/experiment.hpp"
#include "contrain/metrics.hpp"

namespace contrain {

// Deterministic SVG: one seed-mean polyline per arm with a shaded
// standard-error band.
std::string render_curves_svg(const SpeedReport& report);

// Per-arm mean/stderr curves as CSV (iteration, <arm>_mean, <arm>_stderr, ...).
std::string curves_csv(const SpeedReport& report);

// Writes report.md (warnings listed in the footer), report.csv, curves.csv
// and curves.svg under out_dir. Re-running on unchanged inputs is
// byte-identical.
void write_report_files(const SpeedReport& report, const std::string& out_dir,
                        const std::vector<std::string>& warnings);

struct DirReportOptions {
  std::string scratch_arm = "scratch";
  std::vector<int> r_list = {99, 100};
  TargetMode target_mode = TargetMode::final_acc;
};

// Loads every RunRecord JSON in records_dir (sorted by filename), skipping
// corrupt or aborted files with a warning. Throws if nothing usable remains.
SpeedReport report_from_dir(const std::string& records_dir, const DirReportOptions& options,
                            std::vector<std::string>& warnings_out);

void write_sequence_ledger(const SequenceResult& result, const std::string& out_dir);

void write_sweep_summary(const SweepConfig& config, const SweepResult& result,
                         const std::string& out_dir);

}  // namespace contrain
