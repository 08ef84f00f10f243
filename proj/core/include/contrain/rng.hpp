#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace contrain {

// Stateless mixer used for deriving independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

// Derive a child seed from a master seed and a stream index / tag.
// Identical (master, stream) pairs always yield the same child seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag);

// Deterministic random stream. Distribution mapping is implemented here
// rather than with std::*_distribution, whose output is
// implementation-defined; records must reproduce bit-identically.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform index in [0, n). n must be > 0.
  std::size_t uniform_index(std::size_t n);

  // Standard normal via Box-Muller with a cached spare.
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace contrain
