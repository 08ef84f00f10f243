#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "contrain/dataset.hpp"
#include "contrain/rng.hpp"

namespace contrain {

// Per-sample, per-epoch correctness flags recorded during training.
class CorrectnessMatrix {
 public:
  explicit CorrectnessMatrix(std::vector<std::int64_t> ids);

  // One entry per tracked sample, in id order given at construction.
  void add_epoch(const std::vector<std::uint8_t>& correct);

  std::size_t epoch_count() const { return epochs_; }
  const std::vector<std::int64_t>& ids() const { return ids_; }

  // Fraction of epochs in which sample row i was classified correctly.
  double fraction_correct(std::size_t row) const;

 private:
  std::vector<std::int64_t> ids_;
  std::vector<std::uint32_t> correct_counts_;
  std::size_t epochs_ = 0;
};

// Learning speed per sample id, in [0, 1]: the fraction of recorded epochs in
// which the sample was classified correctly.
struct LearningSpeedTable {
  std::map<std::int64_t, double> ls;

  bool empty() const { return ls.empty(); }
  bool covers(const std::vector<std::int64_t>& ids) const;
  double at(std::int64_t id) const;
};

LearningSpeedTable record_learning_speed(const CorrectnessMatrix& matrix);

// CSV layout: header "id,ls".
void write_learning_speed_csv(const LearningSpeedTable& table, std::ostream& out);
void write_learning_speed_csv(const LearningSpeedTable& table, const std::string& path);
LearningSpeedTable read_learning_speed_csv(std::istream& in);

enum class SamplerMode { proportional, balanced_old_new, easy_hard };

std::string sampler_mode_name(SamplerMode m);
SamplerMode sampler_mode_from_name(const std::string& s);

struct SamplerSpec {
  SamplerMode mode = SamplerMode::proportional;
  double affected_fraction = 0.0;  // c: total fraction of old samples affected
  double relative_weight = 1.0;    // r: weight of affected samples vs the rest
  LearningSpeedTable learning_speed;  // required for easy_hard

  void validate() const;
};

// Sorts by learning speed descending (easiest first, ties by ascending id);
// the top c/2 and bottom c/2 fractions get weight r, everyone else 1.0.
std::map<std::int64_t, double> easy_hard_weights(const LearningSpeedTable& table,
                                                 double affected_fraction,
                                                 double relative_weight);

// Preprocessed batch sampler bound to one dataset. Draws are independent and
// with replacement; `balanced_old_new` takes floor(N/2) old then ceil(N/2)
// new uniform draws.
class BatchSampler {
 public:
  BatchSampler(const SamplerSpec& spec, const Dataset& dataset);

  std::vector<std::size_t> draw_indices(std::size_t batch_size, Rng& rng) const;
  std::vector<std::int64_t> draw_ids(std::size_t batch_size, Rng& rng) const;

  // Normalized per-draw inclusion probabilities (weighted modes), aligned
  // with dataset sample order.
  std::vector<double> probabilities() const;

 private:
  const Dataset* dataset_;
  SamplerMode mode_;
  std::vector<double> cumulative_;           // weighted modes
  std::vector<std::size_t> old_indices_, new_indices_;  // balanced mode
};

std::vector<std::int64_t> sample_batch(const SamplerSpec& spec, const Dataset& dataset,
                                       std::size_t batch_size, Rng& rng);

}  // namespace contrain
