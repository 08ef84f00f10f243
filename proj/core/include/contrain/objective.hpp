#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "contrain/network.hpp"

namespace contrain {

// Regularization mode of the training objective.
//   none     - mean softmax cross-entropy only
//   l2       - + lambda * |theta|^2           (reference at the origin)
//   l2_init  - + lambda * |theta - theta_ref|^2, theta_ref = phase-start weights
//   reg_only - regularizer alone, a fixture for checking the 2*lambda*(theta-ref)
//              gradient in isolation
enum class RegMode { none, l2, l2_init, reg_only };

struct ObjectiveSpec {
  RegMode mode = RegMode::none;
  double lambda = 0.0;
  // Required for l2_init and reg_only. Ignored for none; zeros for l2.
  std::shared_ptr<const ParamSet> theta_ref;

  void validate(const ParamSet& params) const;
};

struct LossGrad {
  double loss = 0.0;
  ParamSet grads;
};

// Objective value only (no gradients). Mean cross-entropy over the batch
// plus the regularization term.
double loss_value(const NetworkSpec& spec, const ParamSet& params, const Tensor& batch,
                  const std::vector<std::size_t>& labels, const ObjectiveSpec& objective);

// Analytic loss and gradient. Gradients are structurally identical to params.
LossGrad loss_and_grad(const NetworkSpec& spec, const ParamSet& params, const Tensor& batch,
                       const std::vector<std::size_t>& labels, const ObjectiveSpec& objective);

// Central finite-difference estimate of the same gradient (test oracle).
ParamSet finite_diff_grad(const NetworkSpec& spec, const ParamSet& params, const Tensor& batch,
                          const std::vector<std::size_t>& labels, const ObjectiveSpec& objective,
                          double h);

}  // namespace contrain
