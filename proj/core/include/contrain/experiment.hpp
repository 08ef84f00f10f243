#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "contrain/dataset.hpp"
#include "contrain/metrics.hpp"
#include "contrain/train.hpp"

namespace contrain {

// One table row: a named combination of initialization, regularization,
// batch composition, and scheduler compression.
struct ArmSpec {
  std::string name;
  InitSpec init;
  RegMode reg_mode = RegMode::none;
  double lambda = 0.0;
  SamplerMode sampler_mode = SamplerMode::proportional;
  double affected_fraction = 0.0;  // c
  double relative_weight = 1.0;    // r
  double schedule_multiplier = 1.0;

  void validate() const;
};

struct ExperimentConfig {
  ScenarioSpec scenario;
  std::vector<std::size_t> hidden_widths = {64};
  std::vector<ArmSpec> arms;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};

  std::int64_t iterations = 4000;         // phase-2 budget per arm
  std::int64_t phase1_iterations = 3000;  // old-model budget
  std::int64_t eval_every = 0;            // 0: once per epoch-equivalent
  std::size_t batch_size = 128;
  OptimizerKind optimizer = OptimizerKind::adam;
  double lr_max = 1e-3;
  double lr_min = 1e-6;
  ScheduleFamily schedule_family = ScheduleFamily::cosine;
  std::vector<std::int64_t> milestones;  // multistep only, at multiplier 1.0
  double gamma = 0.1;

  std::vector<int> r_list = {99, 100};
  TargetMode target_mode = TargetMode::final_acc;
  std::string scratch_arm = "scratch";
  std::int64_t easy_hard_warmup_epochs = 10;  // scratch-side "Data" arms
  std::string out_dir = "out";

  void validate() const;
  NetworkSpec network() const;
  std::int64_t effective_eval_every(std::size_t train_size) const;
};

// The paper-style ablation grid: ten technique combinations, each as a
// continuous arm and as a from-scratch arm.
std::vector<ArmSpec> ablation_grid_arms();

// The four-arm default: scratch, naive, the combined method, and scratch
// with the compressed scheduler.
std::vector<ArmSpec> standard_arms();

// The pinned desk-scale scenario (10 Gaussian classes, 7+3 split).
ExperimentConfig desk_config();

struct RunOptions {
  std::size_t workers = 1;
  bool persist = true;  // write records/phase1/report files under out_dir
};

struct ScenarioResult {
  std::map<std::string, std::vector<RunRecord>> records_by_arm;
  SpeedReport report;
};

// Phase 1 trains (or reloads) the old model per seed and records learning
// speeds; phase 2 runs every arm from the appropriate initialization.
ScenarioResult run_scenario(const ExperimentConfig& config, const RunOptions& options = {});

// ---------------------------------------------------------------------------
// Multi-task sequences
// ---------------------------------------------------------------------------

struct SequenceConfig {
  GaussianParams gen;
  std::uint64_t scenario_seed = 0;
  std::size_t base_classes = 5;
  std::vector<std::size_t> increments = {1, 1, 1, 1, 1};
  ArmSpec method_arm;  // continuous method applied at every task
  std::vector<std::size_t> hidden_widths = {64};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};

  std::int64_t task_iterations = 1200;
  std::int64_t eval_every = 0;  // 0: once per epoch-equivalent of the final task
  std::size_t batch_size = 128;
  OptimizerKind optimizer = OptimizerKind::adam;
  double lr_max = 1e-3;
  double lr_min = 1e-6;
  ScheduleFamily schedule_family = ScheduleFamily::cosine;

  TargetMode target_mode = TargetMode::final_acc;
  std::string out_dir = "out_sequence";

  void validate() const;
};

SequenceConfig desk_sequence_config();

struct TaskLedgerEntry {
  std::size_t task_index = 0;
  std::size_t classes_seen = 0;
  double max_possible_accuracy = 0.0;  // classes seen / total classes
  double a_scratch = 0.0;              // per-task scratch reference target
  std::optional<std::int64_t> continuous_iterations;  // s(continuous, a_scratch)
  std::optional<std::int64_t> scratch_iterations;     // s(scratch, a_scratch)
};

struct SequenceSeedResult {
  std::uint64_t seed = 0;
  std::vector<TaskLedgerEntry> tasks;
  // Sum of per-task match costs; unset if any task target was unreached.
  std::optional<std::int64_t> cumulative_continuous;
  std::optional<std::int64_t> cumulative_scratch;
};

struct SequenceResult {
  std::vector<SequenceSeedResult> per_seed;
  std::map<std::string, std::vector<RunRecord>> records_by_arm;
};

// Trains continuously task by task; for each task also trains a from-scratch
// reference on all data so far and records the cost ledger.
SequenceResult run_sequence(const SequenceConfig& config, const RunOptions& options = {});

// ---------------------------------------------------------------------------
// Single-parameter sweeps
// ---------------------------------------------------------------------------

struct SweepConfig {
  ExperimentConfig base;
  std::string parameter;  // alpha | beta | lambda | c | r | multiplier
  std::vector<double> grid;
  std::string base_arm;   // arm the parameter is applied to

  void validate() const;
};

struct SweepResult {
  std::vector<double> grid;
  std::vector<ScenarioResult> per_value;
};

SweepResult run_sweep(const SweepConfig& config, const RunOptions& options = {});

// Apply one sweep parameter value to an arm (validation included).
ArmSpec apply_sweep_parameter(const ArmSpec& arm, const std::string& parameter, double value);

// Effective per-run config (everything except the seed), canonical JSON.
// Its hash is the RunRecord fingerprint.
std::string arm_config_json(const ExperimentConfig& config, const ArmSpec& arm);
std::string phase1_config_json(const ExperimentConfig& config);

std::string fingerprint_of(const std::string& canonical_json);

}  // namespace contrain
