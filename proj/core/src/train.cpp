#include "contrain/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

namespace contrain {

std::string init_mode_name(InitMode m) {
  switch (m) {
    case InitMode::scratch: return "scratch";
    case InitMode::naive: return "naive";
    case InitMode::shrink_perturb: return "shrink_perturb";
  }
  return "scratch";
}

InitMode init_mode_from_name(const std::string& s) {
  if (s == "scratch") return InitMode::scratch;
  if (s == "naive") return InitMode::naive;
  if (s == "shrink_perturb") return InitMode::shrink_perturb;
  throw std::invalid_argument("unknown init mode: " + s);
}

void InitSpec::validate() const {
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("InitSpec: alpha not in [0, 1]");
  if (beta < 0.0) throw std::invalid_argument("InitSpec: beta < 0");
}

ParamSet shrink_perturb(const ParamSet& theta_old, const ParamSet& theta_random,
                        double alpha, double beta) {
  if (alpha < 0.0 || alpha > 1.0) {
    throw std::invalid_argument("shrink_perturb: alpha not in [0, 1]");
  }
  if (beta < 0.0) throw std::invalid_argument("shrink_perturb: beta < 0");
  return ParamSet::combine(theta_old, theta_random, alpha, beta);
}

ParamSet resolve_init(const InitSpec& init, const NetworkSpec& net,
                      const ParamSet* theta_old) {
  init.validate();
  switch (init.mode) {
    case InitMode::scratch:
      return init_params(net, init.random_seed);
    case InitMode::naive:
    case InitMode::shrink_perturb: {
      ParamSet base;
      if (init.scratch_base) {
        base = init_params(net, derive_seed(init.random_seed, "scratch_base"));
      } else {
        if (!theta_old) {
          throw std::invalid_argument("resolve_init: " + init_mode_name(init.mode) +
                                      " requires theta_old");
        }
        base = *theta_old;
      }
      if (init.mode == InitMode::naive) return base;
      return shrink_perturb(base, init_params(net, init.random_seed), init.alpha, init.beta);
    }
  }
  throw std::logic_error("resolve_init: unreachable");
}

double accuracy(const NetworkSpec& net, const ParamSet& params, const Dataset& dataset) {
  if (dataset.size() == 0) throw std::invalid_argument("accuracy: empty dataset");
  const ForwardCache cache = forward(net, params, dataset.feature_tensor());
  const auto preds = predict(cache.logits());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] == dataset.samples[i].label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(preds.size());
}

std::int64_t iterations_per_epoch(std::size_t dataset_size, std::size_t batch_size) {
  if (batch_size == 0) throw std::invalid_argument("iterations_per_epoch: batch_size == 0");
  return static_cast<std::int64_t>((dataset_size + batch_size - 1) / batch_size);
}

std::string param_hash(const ParamSet& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix_bytes = [&h](const void* p, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& e : params.entries) {
    mix_bytes(e.name.data(), e.name.size());
    mix_bytes(e.value.data.data(), e.value.data.size() * sizeof(double));
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

void TrainSpec::validate() const {
  net.validate();
  init.validate();
  sampler.validate();
  schedule.validate();
  if (lambda < 0.0) throw std::invalid_argument("TrainSpec: lambda < 0");
  if (iterations < 0) throw std::invalid_argument("TrainSpec: iterations < 0");
  if (eval_every < 1) throw std::invalid_argument("TrainSpec: eval_every < 1");
  if (batch_size == 0) throw std::invalid_argument("TrainSpec: batch_size == 0");
  if (easy_hard_warmup_epochs < 0) {
    throw std::invalid_argument("TrainSpec: easy_hard_warmup_epochs < 0");
  }
}

namespace {

// Batch tensor/labels gathered from dataset rows.
void gather_batch(const Dataset& data, const std::vector<std::size_t>& indices,
                  Tensor& batch, std::vector<std::size_t>& labels) {
  const std::size_t d = data.feature_dim();
  batch = Tensor::zeros({indices.size(), d});
  labels.resize(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const Sample& s = data.samples[indices[i]];
    std::copy(s.features.begin(), s.features.end(), &batch.data[i * d]);
    labels[i] = s.label;
  }
}

// Mean Euclidean norm of per-sample data-term gradients over a probe subset.
double mean_probe_grad_norm(const NetworkSpec& net, const ParamSet& params,
                            const Dataset& data, const std::vector<std::size_t>& probe) {
  if (probe.empty()) return 0.0;
  const ObjectiveSpec plain;  // data term only
  const std::size_t d = data.feature_dim();
  Tensor one = Tensor::zeros({1, d});
  std::vector<std::size_t> label(1);
  double total = 0.0;
  for (std::size_t idx : probe) {
    const Sample& s = data.samples[idx];
    std::copy(s.features.begin(), s.features.end(), one.data.begin());
    label[0] = s.label;
    const LossGrad lg = loss_and_grad(net, params, one, label, plain);
    total += lg.grads.l2_norm();
  }
  return total / static_cast<double>(probe.size());
}

std::vector<std::size_t> pick_probe(const std::vector<std::size_t>& pool, std::size_t count,
                                    Rng& rng) {
  if (pool.size() <= count) return pool;
  // Seeded partial Fisher-Yates: the first `count` slots of a shuffle.
  std::vector<std::size_t> work = pool;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.uniform_index(work.size() - i);
    std::swap(work[i], work[j]);
  }
  work.resize(count);
  return work;
}

// Correctness flags for the full train set under the current parameters.
std::vector<std::uint8_t> epoch_correctness(const NetworkSpec& net, const ParamSet& params,
                                            const Dataset& train_set) {
  const ForwardCache cache = forward(net, params, train_set.feature_tensor());
  const auto preds = predict(cache.logits());
  std::vector<std::uint8_t> correct(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    correct[i] = preds[i] == train_set.samples[i].label ? 1 : 0;
  }
  return correct;
}

}  // namespace

TrainResult train(const TrainSpec& spec, const Dataset& train_set, const Dataset& test_set,
                  const ParamSet* theta_old, std::uint64_t seed) {
  spec.validate();
  if (train_set.size() == 0) throw std::invalid_argument("train: empty training set");
  if (test_set.size() == 0) throw std::invalid_argument("train: empty test set");

  const auto t_start = std::chrono::steady_clock::now();

  TrainResult result;
  RunRecord& rec = result.record;
  rec.seed = seed;
  rec.total_iterations = spec.iterations;

  ParamSet params = resolve_init(spec.init, spec.net, theta_old);

  // Phase-start snapshot: the l2_init anchor.
  ObjectiveSpec objective;
  objective.mode = spec.reg_mode;
  objective.lambda = spec.lambda;
  if (spec.reg_mode == RegMode::l2_init || spec.reg_mode == RegMode::reg_only) {
    objective.theta_ref = std::make_shared<const ParamSet>(params);
  }

  // Sampler. An easy_hard spec with no table self-records during warmup.
  SamplerSpec sampler_spec = spec.sampler;
  bool warmup_active = false;
  if (sampler_spec.mode == SamplerMode::easy_hard && sampler_spec.learning_speed.empty()) {
    if (spec.easy_hard_warmup_epochs <= 0) {
      throw std::invalid_argument(
          "train: easy_hard sampling requires a recorded learning-speed table "
          "(or a warmup epoch count for self-recording)");
    }
    warmup_active = true;
    sampler_spec.mode = SamplerMode::proportional;
  }
  BatchSampler sampler(sampler_spec, train_set);

  Rng sample_rng(derive_seed(seed, "sampler"));

  // Fixed per-origin probe subsets for gradient-norm instrumentation.
  std::vector<std::size_t> old_pool, new_pool;
  for (std::size_t i = 0; i < train_set.size(); ++i) {
    (train_set.samples[i].origin == Origin::old_data ? old_pool : new_pool).push_back(i);
  }
  Rng probe_rng(derive_seed(seed, "probe"));
  const auto probe_old = pick_probe(old_pool, spec.grad_probe_per_origin, probe_rng);
  const auto probe_new = pick_probe(new_pool, spec.grad_probe_per_origin, probe_rng);

  const std::int64_t epoch_len = iterations_per_epoch(train_set.size(), spec.batch_size);
  const bool track_epochs = spec.record_learning_speed || warmup_active;
  if (spec.record_learning_speed && spec.iterations < epoch_len) {
    throw std::invalid_argument(
        "train: learning-speed recording needs at least one full epoch");
  }

  CorrectnessMatrix correctness(train_set.ids());

  auto evaluate = [&](std::int64_t iteration) {
    rec.eval_iters.push_back(iteration);
    rec.test_accuracy.push_back(accuracy(spec.net, params, test_set));
    if (!probe_old.empty()) {
      rec.grad_norm_old.push_back(mean_probe_grad_norm(spec.net, params, train_set, probe_old));
    }
    if (!probe_new.empty()) {
      rec.grad_norm_new.push_back(mean_probe_grad_norm(spec.net, params, train_set, probe_new));
    }
  };

  OptimizerState opt_state = OptimizerState::make(spec.optimizer, params);
  evaluate(0);

  Tensor batch;
  std::vector<std::size_t> labels;
  rec.train_loss.reserve(static_cast<std::size_t>(spec.iterations));

  for (std::int64_t t = 0; t < spec.iterations; ++t) {
    const auto indices = sampler.draw_indices(spec.batch_size, sample_rng);
    gather_batch(train_set, indices, batch, labels);

    const LossGrad lg = loss_and_grad(spec.net, params, batch, labels, objective);
    rec.train_loss.push_back(lg.loss);
    if (!std::isfinite(lg.loss)) {
      rec.aborted = true;
      rec.abort_reason = "non-finite loss at iteration " + std::to_string(t);
      break;
    }

    params = optimizer_step(opt_state, params, lg.grads, lr_at(spec.schedule, t));

    const std::int64_t done = t + 1;
    if (track_epochs && done % epoch_len == 0) {
      correctness.add_epoch(epoch_correctness(spec.net, params, train_set));
      if (warmup_active &&
          correctness.epoch_count() ==
              static_cast<std::size_t>(spec.easy_hard_warmup_epochs)) {
        // Switch to easy/hard weights computed from the run's own history.
        sampler_spec = spec.sampler;
        sampler_spec.learning_speed = record_learning_speed(correctness);
        sampler = BatchSampler(sampler_spec, train_set);
        warmup_active = false;
      }
    }
    if (done % spec.eval_every == 0 || done == spec.iterations) {
      evaluate(done);
    }
  }

  if (spec.record_learning_speed && correctness.epoch_count() >= 1) {
    result.learning_speed = record_learning_speed(correctness);
  }

  result.params = std::move(params);
  rec.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t_start)
                    .count();
  return result;
}

}  // namespace contrain
