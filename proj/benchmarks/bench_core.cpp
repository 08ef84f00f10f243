#include <benchmark/benchmark.h>

#include "contrain/dataset.hpp"
#include "contrain/metrics.hpp"
#include "contrain/network.hpp"
#include "contrain/objective.hpp"
#include "contrain/optimizer.hpp"
#include "contrain/rng.hpp"
#include "contrain/sampling.hpp"
#include "contrain/schedule.hpp"
#include "contrain/train.hpp"

namespace {

using namespace contrain;

// The desk-scale network and batch shape used by the experiments.
const NetworkSpec kNet{{32, 64, 10}};

Tensor make_batch(std::size_t n) {
  Rng rng(1);
  Tensor t = Tensor::zeros({n, kNet.input_dim()});
  for (double& v : t.data) v = rng.normal();
  return t;
}

std::vector<std::size_t> make_labels(std::size_t n) {
  Rng rng(2);
  std::vector<std::size_t> labels(n);
  for (auto& y : labels) y = rng.uniform_index(kNet.class_count());
  return labels;
}

void BM_forward(benchmark::State& state) {
  const ParamSet params = init_params(kNet, 3);
  const Tensor batch = make_batch(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(kNet, params, batch));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_forward)->Arg(32)->Arg(128);

void BM_loss_and_grad(benchmark::State& state) {
  const ParamSet params = init_params(kNet, 3);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Tensor batch = make_batch(n);
  const auto labels = make_labels(n);
  ObjectiveSpec objective;
  objective.mode = RegMode::l2;
  objective.lambda = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(loss_and_grad(kNet, params, batch, labels, objective));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_loss_and_grad)->Arg(32)->Arg(128);

void BM_adam_step(benchmark::State& state) {
  ParamSet params = init_params(kNet, 3);
  ParamSet grads = init_params(kNet, 4);
  OptimizerState opt = OptimizerState::make(OptimizerKind::adam, params);
  for (auto _ : state) {
    params = adam_step(opt, params, grads, 1e-3);
  }
}
BENCHMARK(BM_adam_step);

void BM_weighted_draws(benchmark::State& state) {
  Dataset data;
  data.class_count = 10;
  LearningSpeedTable table;
  for (std::size_t i = 0; i < 5000; ++i) {
    Sample s;
    s.id = static_cast<std::int64_t>(i);
    s.features = {0.0};
    s.label = 0;
    s.origin = i < 3500 ? Origin::old_data : Origin::new_data;
    if (i < 3500) table.ls[s.id] = static_cast<double>(i) / 3500.0;
    data.samples.push_back(std::move(s));
  }
  SamplerSpec spec;
  spec.mode = SamplerMode::easy_hard;
  spec.affected_fraction = 0.2;
  spec.relative_weight = 0.1;
  spec.learning_speed = table;
  const BatchSampler sampler(spec, data);
  Rng rng(5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sampler.draw_indices(128, rng));
  }
  state.SetItemsProcessed(state.iterations() * 128);
}
BENCHMARK(BM_weighted_draws);

void BM_lr_at(benchmark::State& state) {
  SchedulerSpec sched;
  sched.horizon = 4000;
  sched.multiplier = 0.25;
  std::int64_t t = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lr_at(sched, t));
    t = (t + 1) % 4000;
  }
}
BENCHMARK(BM_lr_at);

void BM_speed_scan(benchmark::State& state) {
  LearningCurve curve;
  Rng rng(6);
  for (std::int64_t it = 0; it < 1000; ++it) {
    curve.iters.push_back(it * 40);
    curve.acc.push_back(std::min(1.0, rng.uniform() * 0.2 + it / 1000.0));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(speed(curve, 0.97));
  }
}
BENCHMARK(BM_speed_scan);

}  // namespace

BENCHMARK_MAIN();
