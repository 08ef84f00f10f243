#include "contrain/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace contrain {

std::string optimizer_name(OptimizerKind k) {
  return k == OptimizerKind::sgd ? "sgd" : "adam";
}

OptimizerKind optimizer_from_name(const std::string& s) {
  if (s == "sgd") return OptimizerKind::sgd;
  if (s == "adam") return OptimizerKind::adam;
  throw std::invalid_argument("unknown optimizer: " + s);
}

OptimizerState OptimizerState::make(OptimizerKind kind, const ParamSet& params,
                                    AdamConfig adam_cfg) {
  OptimizerState state;
  state.kind = kind;
  state.adam = adam_cfg;
  if (kind == OptimizerKind::adam) {
    state.first_moment = params.zeros_like();
    state.second_moment = params.zeros_like();
  }
  return state;
}

ParamSet sgd_step(const ParamSet& params, const ParamSet& grads, double lr) {
  if (lr < 0.0) throw std::invalid_argument("sgd_step: negative learning rate");
  return ParamSet::combine(params, grads, 1.0, -lr);
}

ParamSet adam_step(OptimizerState& state, const ParamSet& params, const ParamSet& grads,
                   double lr) {
  if (state.kind != OptimizerKind::adam) {
    throw std::invalid_argument("adam_step: state is not an adam state");
  }
  if (!params.same_structure(grads) || !params.same_structure(state.first_moment)) {
    throw std::invalid_argument("adam_step: structure mismatch");
  }

  state.step += 1;
  const double b1 = state.adam.beta1;
  const double b2 = state.adam.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(state.step));

  ParamSet out = params;
  for (std::size_t e = 0; e < params.entries.size(); ++e) {
    auto& m = state.first_moment.entries[e].value.data;
    auto& v = state.second_moment.entries[e].value.data;
    const auto& g = grads.entries[e].value.data;
    auto& p = out.entries[e].value.data;
    for (std::size_t k = 0; k < g.size(); ++k) {
      m[k] = b1 * m[k] + (1.0 - b1) * g[k];
      v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      p[k] -= lr * m_hat / (std::sqrt(v_hat) + state.adam.epsilon);
    }
  }
  return out;
}

ParamSet optimizer_step(OptimizerState& state, const ParamSet& params, const ParamSet& grads,
                        double lr) {
  if (state.kind == OptimizerKind::sgd) {
    state.step += 1;
    return sgd_step(params, grads, lr);
  }
  return adam_step(state, params, grads, lr);
}

}  // namespace contrain
