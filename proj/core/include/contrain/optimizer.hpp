#pragma once

#include <cstdint>
#include <string>

#include "contrain/network.hpp"

namespace contrain {

enum class OptimizerKind { sgd, adam };

std::string optimizer_name(OptimizerKind k);
OptimizerKind optimizer_from_name(const std::string& s);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct OptimizerState {
  OptimizerKind kind = OptimizerKind::sgd;
  AdamConfig adam;
  ParamSet first_moment;   // adam only
  ParamSet second_moment;  // adam only
  std::int64_t step = 0;

  static OptimizerState make(OptimizerKind kind, const ParamSet& params,
                             AdamConfig adam = {});
};

// theta <- theta - lr * grads (batch-mean gradient is computed upstream).
ParamSet sgd_step(const ParamSet& params, const ParamSet& grads, double lr);

// Bias-corrected Adam update; mutates the moment estimates and step counter.
ParamSet adam_step(OptimizerState& state, const ParamSet& params, const ParamSet& grads,
                   double lr);

ParamSet optimizer_step(OptimizerState& state, const ParamSet& params, const ParamSet& grads,
                        double lr);

}  // namespace contrain
