#include "contrain/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "contrain/rng.hpp"

namespace contrain {

void NetworkSpec::validate() const {
  if (layer_widths.size() < 2) {
    throw std::invalid_argument("NetworkSpec: need at least input and output widths");
  }
  for (std::size_t w : layer_widths) {
    if (w == 0) throw std::invalid_argument("NetworkSpec: zero layer width");
  }
}

bool ParamSet::same_structure(const ParamSet& other) const {
  if (entries.size() != other.entries.size()) return false;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].name != other.entries[i].name) return false;
    if (!entries[i].value.same_shape(other.entries[i].value)) return false;
  }
  return true;
}

std::size_t ParamSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.value.size();
  return n;
}

bool ParamSet::all_finite() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const Entry& e) { return e.value.all_finite(); });
}

ParamSet ParamSet::combine(const ParamSet& a, const ParamSet& b, double ca, double cb) {
  if (!a.same_structure(b)) {
    throw std::invalid_argument("ParamSet::combine: structure mismatch");
  }
  ParamSet out = a;
  for (std::size_t i = 0; i < out.entries.size(); ++i) {
    auto& dst = out.entries[i].value.data;
    const auto& src = b.entries[i].value.data;
    for (std::size_t k = 0; k < dst.size(); ++k) {
      dst[k] = ca * dst[k] + cb * src[k];
    }
  }
  return out;
}

ParamSet ParamSet::zeros_like() const {
  ParamSet out = *this;
  for (auto& e : out.entries) {
    std::fill(e.value.data.begin(), e.value.data.end(), 0.0);
  }
  return out;
}

double ParamSet::sq_distance(const ParamSet* ref) const {
  if (ref && !same_structure(*ref)) {
    throw std::invalid_argument("ParamSet::sq_distance: structure mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& v = entries[i].value.data;
    if (ref) {
      const auto& r = ref->entries[i].value.data;
      for (std::size_t k = 0; k < v.size(); ++k) {
        const double d = v[k] - r[k];
        acc += d * d;
      }
    } else {
      for (double x : v) acc += x * x;
    }
  }
  return acc;
}

double ParamSet::l2_norm() const { return std::sqrt(sq_distance(nullptr)); }

bool ParamSet::operator==(const ParamSet& other) const {
  if (!same_structure(other)) return false;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].value.data != other.entries[i].value.data) return false;
  }
  return true;
}

ParamSet init_params(const NetworkSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  ParamSet params;
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    const std::size_t fan_in = spec.layer_widths[l];
    const std::size_t fan_out = spec.layer_widths[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));

    Tensor w = Tensor::zeros({fan_out, fan_in});
    for (double& v : w.data) v = rng.uniform(-bound, bound);
    params.entries.push_back({"layer" + std::to_string(l) + ".weight", std::move(w)});

    Tensor b = Tensor::zeros({fan_out});
    params.entries.push_back({"layer" + std::to_string(l) + ".bias", std::move(b)});
  }
  return params;
}

ParamSet zero_params(const NetworkSpec& spec) {
  ParamSet p = init_params(spec, 0);
  return p.zeros_like();
}

ForwardCache forward(const NetworkSpec& spec, const ParamSet& params, const Tensor& batch) {
  spec.validate();
  if (batch.shape.size() != 2 || batch.cols() != spec.input_dim()) {
    throw std::invalid_argument("forward: batch shape " + batch.shape_str() +
                                " does not match input width " +
                                std::to_string(spec.input_dim()));
  }
  const std::size_t n = batch.rows();

  ForwardCache cache;
  cache.inputs.reserve(spec.layer_count());
  cache.preacts.reserve(spec.layer_count());

  Tensor act = batch;
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    const Tensor& w = params.entries[2 * l].value;      // [out x in]
    const Tensor& b = params.entries[2 * l + 1].value;  // [out]
    const std::size_t in = w.cols();
    const std::size_t out = w.rows();
    if (act.cols() != in) {
      throw std::invalid_argument("forward: layer " + std::to_string(l) +
                                  " expects input width " + std::to_string(in) +
                                  ", got " + std::to_string(act.cols()));
    }

    Tensor z = Tensor::zeros({n, out});
    for (std::size_t i = 0; i < n; ++i) {
      const double* x = &act.data[i * in];
      double* zrow = &z.data[i * out];
      for (std::size_t o = 0; o < out; ++o) {
        const double* wrow = &w.data[o * in];
        double acc = b.data[o];
        for (std::size_t k = 0; k < in; ++k) acc += x[k] * wrow[k];
        zrow[o] = acc;
      }
    }

    cache.inputs.push_back(std::move(act));
    if (l + 1 < spec.layer_count()) {
      Tensor a = z;
      for (double& v : a.data) v = v > 0.0 ? v : 0.0;
      act = std::move(a);
    }
    cache.preacts.push_back(std::move(z));
  }
  return cache;
}

Tensor softmax(const Tensor& logits) {
  Tensor out = logits;
  const std::size_t n = logits.rows();
  const std::size_t c = logits.cols();
  for (std::size_t i = 0; i < n; ++i) {
    double* row = &out.data[i * c];
    const double mx = *std::max_element(row, row + c);
    double sum = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      row[j] = std::exp(row[j] - mx);
      sum += row[j];
    }
    for (std::size_t j = 0; j < c; ++j) row[j] /= sum;
  }
  return out;
}

std::vector<std::size_t> predict(const Tensor& logits) {
  const std::size_t n = logits.rows();
  const std::size_t c = logits.cols();
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = &logits.data[i * c];
    out[i] = static_cast<std::size_t>(std::max_element(row, row + c) - row);
  }
  return out;
}

}  // namespace contrain
