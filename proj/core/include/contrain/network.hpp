#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "contrain/tensor.hpp"

namespace contrain {

enum class Activation { relu };

// Fully connected classifier: layer_widths = {input dim, hidden..., classes}.
struct NetworkSpec {
  std::vector<std::size_t> layer_widths;
  Activation activation = Activation::relu;

  std::size_t input_dim() const { return layer_widths.front(); }
  std::size_t class_count() const { return layer_widths.back(); }
  std::size_t layer_count() const { return layer_widths.size() - 1; }

  void validate() const;
};

// Named parameter tensors in a fixed order: layer
// "layerK.weight" [out x in], "layerK.bias" [out].
struct ParamSet {
  struct Entry {
    std::string name;
    Tensor value;
  };
  std::vector<Entry> entries;

  bool same_structure(const ParamSet& other) const;
  std::size_t scalar_count() const;
  bool all_finite() const;

  // ca * a + cb * b, elementwise over every entry.
  static ParamSet combine(const ParamSet& a, const ParamSet& b, double ca, double cb);

  // Zero-filled copy of this structure.
  ParamSet zeros_like() const;

  // Sum over entries of (theta - ref)^2. ref may be null (treated as zeros).
  double sq_distance(const ParamSet* ref) const;

  // Euclidean norm over all scalars.
  double l2_norm() const;

  bool operator==(const ParamSet& other) const;
};

// Per-layer inputs and pre-activations for one batch, plus the final logits.
struct ForwardCache {
  std::vector<Tensor> inputs;   // inputs[l] is the input to layer l; inputs[0] = batch
  std::vector<Tensor> preacts;  // preacts[l] = inputs[l] * W_l^T + b_l
  const Tensor& logits() const { return preacts.back(); }
};

// Fan-in scaled uniform init, bound = sqrt(6 / fan_in); biases zero.
// Bit-identical output for identical (spec, seed).
ParamSet init_params(const NetworkSpec& spec, std::uint64_t seed);

ParamSet zero_params(const NetworkSpec& spec);

// Forward pass for a batch [N x input_dim]. Throws on width mismatch with a
// dimension report.
ForwardCache forward(const NetworkSpec& spec, const ParamSet& params, const Tensor& batch);

// Row-wise softmax, numerically stable (shift by row max).
Tensor softmax(const Tensor& logits);

// argmax per row, first maximum wins.
std::vector<std::size_t> predict(const Tensor& logits);

}  // namespace contrain
