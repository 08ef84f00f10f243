#include "contrain/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace contrain {

namespace {

void check_inputs(const Tensor& batch, const std::vector<std::size_t>& labels,
                  std::size_t class_count, const ObjectiveSpec& objective) {
  if (objective.mode != RegMode::reg_only) {
    if (batch.rows() == 0) throw std::invalid_argument("objective: empty batch");
    if (labels.size() != batch.rows()) {
      throw std::invalid_argument("objective: labels/batch size mismatch");
    }
    for (std::size_t y : labels) {
      if (y >= class_count) throw std::invalid_argument("objective: label out of range");
    }
  }
  if (objective.lambda < 0.0) throw std::invalid_argument("objective: lambda < 0");
}

// Mean cross-entropy via log-sum-exp shifted by the row max.
double cross_entropy(const Tensor& logits, const std::vector<std::size_t>& labels) {
  const std::size_t n = logits.rows();
  const std::size_t c = logits.cols();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = &logits.data[i * c];
    const double mx = *std::max_element(row, row + c);
    double sum = 0.0;
    for (std::size_t j = 0; j < c; ++j) sum += std::exp(row[j] - mx);
    total += mx + std::log(sum) - row[labels[i]];
  }
  return total / static_cast<double>(n);
}

const ParamSet* reg_reference(const ObjectiveSpec& objective) {
  switch (objective.mode) {
    case RegMode::none:
      return nullptr;
    case RegMode::l2:
      return nullptr;  // reference at the origin, handled as zeros
    case RegMode::l2_init:
    case RegMode::reg_only:
      return objective.theta_ref.get();
  }
  return nullptr;
}

double reg_term(const ParamSet& params, const ObjectiveSpec& objective) {
  if (objective.mode == RegMode::none || objective.lambda == 0.0) return 0.0;
  return objective.lambda * params.sq_distance(reg_reference(objective));
}

}  // namespace

void ObjectiveSpec::validate(const ParamSet& params) const {
  if (lambda < 0.0) throw std::invalid_argument("ObjectiveSpec: lambda < 0");
  if (mode == RegMode::l2_init || mode == RegMode::reg_only) {
    if (!theta_ref) throw std::invalid_argument("ObjectiveSpec: theta_ref required");
    if (!theta_ref->same_structure(params)) {
      throw std::invalid_argument("ObjectiveSpec: theta_ref structure mismatch");
    }
  }
}

double loss_value(const NetworkSpec& spec, const ParamSet& params, const Tensor& batch,
                  const std::vector<std::size_t>& labels, const ObjectiveSpec& objective) {
  check_inputs(batch, labels, spec.class_count(), objective);
  objective.validate(params);
  if (objective.mode == RegMode::reg_only) return reg_term(params, objective);
  const ForwardCache cache = forward(spec, params, batch);
  return cross_entropy(cache.logits(), labels) + reg_term(params, objective);
}

LossGrad loss_and_grad(const NetworkSpec& spec, const ParamSet& params, const Tensor& batch,
                       const std::vector<std::size_t>& labels, const ObjectiveSpec& objective) {
  check_inputs(batch, labels, spec.class_count(), objective);
  objective.validate(params);

  LossGrad out;
  out.grads = params.zeros_like();

  if (objective.mode != RegMode::reg_only) {
    const ForwardCache cache = forward(spec, params, batch);
    const Tensor& logits = cache.logits();
    const std::size_t n = batch.rows();
    const std::size_t layers = spec.layer_count();

    out.loss = cross_entropy(logits, labels);

    // dL/dlogits = (softmax - onehot) / N
    Tensor delta = softmax(logits);
    for (std::size_t i = 0; i < n; ++i) {
      delta.data[i * delta.cols() + labels[i]] -= 1.0;
    }
    for (double& v : delta.data) v /= static_cast<double>(n);

    for (std::size_t l = layers; l-- > 0;) {
      const Tensor& w = params.entries[2 * l].value;
      const Tensor& input = cache.inputs[l];
      const std::size_t in = w.cols();
      const std::size_t outw = w.rows();

      Tensor& gw = out.grads.entries[2 * l].value;
      Tensor& gb = out.grads.entries[2 * l + 1].value;
      for (std::size_t i = 0; i < n; ++i) {
        const double* drow = &delta.data[i * outw];
        const double* xrow = &input.data[i * in];
        for (std::size_t o = 0; o < outw; ++o) {
          const double d = drow[o];
          gb.data[o] += d;
          double* gwrow = &gw.data[o * in];
          for (std::size_t k = 0; k < in; ++k) gwrow[k] += d * xrow[k];
        }
      }

      if (l > 0) {
        // Propagate: delta_prev = (delta * W) o relu'(preact_{l-1})
        const Tensor& z = cache.preacts[l - 1];
        Tensor prev = Tensor::zeros({n, in});
        for (std::size_t i = 0; i < n; ++i) {
          const double* drow = &delta.data[i * outw];
          double* prow = &prev.data[i * in];
          for (std::size_t o = 0; o < outw; ++o) {
            const double d = drow[o];
            if (d == 0.0) continue;
            const double* wrow = &w.data[o * in];
            for (std::size_t k = 0; k < in; ++k) prow[k] += d * wrow[k];
          }
          const double* zrow = &z.data[i * in];
          for (std::size_t k = 0; k < in; ++k) {
            if (zrow[k] <= 0.0) prow[k] = 0.0;
          }
        }
        delta = std::move(prev);
      }
    }
  }

  // Regularizer contributes exactly 2*lambda*(theta - theta_ref).
  if (objective.mode != RegMode::none && objective.lambda != 0.0) {
    out.loss += reg_term(params, objective);
    const ParamSet* ref = reg_reference(objective);
    const double two_lambda = 2.0 * objective.lambda;
    for (std::size_t e = 0; e < params.entries.size(); ++e) {
      const auto& v = params.entries[e].value.data;
      auto& g = out.grads.entries[e].value.data;
      if (ref) {
        const auto& r = ref->entries[e].value.data;
        for (std::size_t k = 0; k < v.size(); ++k) g[k] += two_lambda * (v[k] - r[k]);
      } else {
        for (std::size_t k = 0; k < v.size(); ++k) g[k] += two_lambda * v[k];
      }
    }
  }

  return out;
}

ParamSet finite_diff_grad(const NetworkSpec& spec, const ParamSet& params, const Tensor& batch,
                          const std::vector<std::size_t>& labels, const ObjectiveSpec& objective,
                          double h) {
  if (h <= 0.0) throw std::invalid_argument("finite_diff_grad: h must be > 0");
  ParamSet grads = params.zeros_like();
  ParamSet probe = params;
  for (std::size_t e = 0; e < probe.entries.size(); ++e) {
    auto& v = probe.entries[e].value.data;
    auto& g = grads.entries[e].value.data;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double orig = v[k];
      v[k] = orig + h;
      const double up = loss_value(spec, probe, batch, labels, objective);
      v[k] = orig - h;
      const double down = loss_value(spec, probe, batch, labels, objective);
      v[k] = orig;
      g[k] = (up - down) / (2.0 * h);
    }
  }
  return grads;
}

}  // namespace contrain
