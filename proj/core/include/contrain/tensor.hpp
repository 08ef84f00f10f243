#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace contrain {

// Dense row-major 64-bit float tensor. Rank is 1 or 2 everywhere in this
// project (bias vectors and weight matrices / sample batches).
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::vector<std::size_t> shape_, std::vector<double> data_);

  static Tensor zeros(std::vector<std::size_t> shape);

  std::size_t size() const { return data.size(); }
  std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }

  double& at(std::size_t i, std::size_t j) { return data[i * cols() + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols() + j]; }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }
  bool all_finite() const;

  std::string shape_str() const;
};

// Strict element count check against the shape product.
std::size_t shape_product(const std::vector<std::size_t>& shape);

}  // namespace contrain
