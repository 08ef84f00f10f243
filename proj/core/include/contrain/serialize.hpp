#pragma once

#include <string>

#include "contrain/experiment.hpp"
#include "contrain/sampling.hpp"
#include "contrain/train.hpp"

namespace contrain {

// All file formats carry schema_version = 1. Doubles round-trip exactly
// (shortest representation that parses back to the same bits).
inline constexpr int kSchemaVersion = 1;

// RunRecord <-> JSON. wall_ms is excluded so reruns are byte-identical.
std::string serialize_run_record(const RunRecord& record);
RunRecord parse_run_record(const std::string& text);

// Per-run flat CSV: iteration,test_accuracy,train_loss,grad_norm_old,grad_norm_new.
// Accuracy and gradient norms appear on eval rows, loss on step rows.
std::string run_record_csv(const RunRecord& record);

// Old-model snapshot persisted after phase 1.
struct Phase1Snapshot {
  std::string fingerprint;  // hash of the phase-1 effective config
  std::uint64_t seed = 0;
  ParamSet params;
  LearningSpeedTable learning_speed;
};

std::string serialize_phase1(const Phase1Snapshot& snapshot);
Phase1Snapshot parse_phase1(const std::string& text);

// Experiment / sequence / sweep configs <-> JSON.
std::string serialize_experiment_config(const ExperimentConfig& config);
ExperimentConfig parse_experiment_config(const std::string& text);

std::string serialize_sequence_config(const SequenceConfig& config);
SequenceConfig parse_sequence_config(const std::string& text);

std::string serialize_sweep_config(const SweepConfig& config);
SweepConfig parse_sweep_config(const std::string& text);

// Dispatch on the "kind" field of a config file.
std::string config_kind(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace contrain
