#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "contrain/dataset.hpp"
#include "contrain/network.hpp"
#include "contrain/objective.hpp"
#include "contrain/optimizer.hpp"
#include "contrain/sampling.hpp"
#include "contrain/schedule.hpp"

namespace contrain {

enum class InitMode { scratch, naive, shrink_perturb };

std::string init_mode_name(InitMode m);
InitMode init_mode_from_name(const std::string& s);

// How phase-2 training is initialized. `scratch_base` substitutes a fresh
// random draw for theta_old, which is how the warm-start techniques are
// applied to the from-scratch ablation arms (which have no old model).
struct InitSpec {
  InitMode mode = InitMode::scratch;
  double alpha = 0.4;
  double beta = 0.001;
  std::uint64_t random_seed = 0;  // seed for theta_random (and scratch init)
  bool scratch_base = false;

  void validate() const;
};

// theta_init = alpha * theta_old + beta * theta_random, every trainable
// parameter included (biases too).
ParamSet shrink_perturb(const ParamSet& theta_old, const ParamSet& theta_random,
                        double alpha, double beta);

ParamSet resolve_init(const InitSpec& init, const NetworkSpec& net,
                      const ParamSet* theta_old);

// Fraction of samples whose argmax prediction matches the label.
double accuracy(const NetworkSpec& net, const ParamSet& params, const Dataset& dataset);

// One training run's instrumentation. `wall_ms` is in-memory only and is
// deliberately excluded from serialization so that records reproduce
// byte-identically across reruns.
struct RunRecord {
  std::string arm;
  std::string fingerprint;         // config fingerprint, hex
  std::string phase1_fingerprint;  // hash of theta_old; empty for scratch arms
  std::uint64_t seed = 0;
  std::string config_json;  // canonical effective config; may be empty for library calls

  std::vector<std::int64_t> eval_iters;
  std::vector<double> test_accuracy;
  std::vector<double> grad_norm_old;  // aligned with eval_iters; empty when origin absent
  std::vector<double> grad_norm_new;

  std::vector<double> train_loss;  // train_loss[t] = batch objective at iteration t

  std::int64_t total_iterations = 0;
  bool aborted = false;
  std::string abort_reason;
  double wall_ms = 0.0;
};

struct TrainSpec {
  NetworkSpec net;
  InitSpec init;
  // theta_ref is ignored here: for l2_init it is snapshotted from the
  // phase-start parameters before the first step.
  RegMode reg_mode = RegMode::none;
  double lambda = 0.0;
  SamplerSpec sampler;
  SchedulerSpec schedule;
  OptimizerKind optimizer = OptimizerKind::adam;
  std::int64_t iterations = 0;
  std::int64_t eval_every = 1;  // k; also the learning-speed epoch grid
  std::size_t batch_size = 128;

  bool record_learning_speed = false;
  // For easy_hard arms without a recorded table (from-scratch "Data" arms):
  // sample proportionally for this many epochs while recording, then switch
  // to easy/hard weights derived from the run's own history.
  std::int64_t easy_hard_warmup_epochs = 0;

  std::size_t grad_probe_per_origin = 256;

  void validate() const;
};

struct TrainResult {
  RunRecord record;
  ParamSet params;
  LearningSpeedTable learning_speed;  // empty unless recording was requested
};

// The instrumented loop: sample batch -> loss_and_grad -> optimizer step at
// lr_at(t). Combined test accuracy and per-origin gradient-norm probes are
// recorded at iteration 0, every eval_every iterations, and at the final
// iteration; the batch loss is recorded every iteration. A non-finite loss
// aborts the run and leaves a diagnostic record.
TrainResult train(const TrainSpec& spec, const Dataset& train_set, const Dataset& test_set,
                  const ParamSet* theta_old, std::uint64_t seed);

// Iterations per epoch-equivalent under with-replacement sampling.
std::int64_t iterations_per_epoch(std::size_t dataset_size, std::size_t batch_size);

// FNV-1a hash of the raw parameter bytes; identifies phase-1 snapshots.
std::string param_hash(const ParamSet& params);

}  // namespace contrain
