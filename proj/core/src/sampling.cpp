#include "contrain/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace contrain {

CorrectnessMatrix::CorrectnessMatrix(std::vector<std::int64_t> ids)
    : ids_(std::move(ids)), correct_counts_(ids_.size(), 0) {
  if (ids_.empty()) throw std::invalid_argument("CorrectnessMatrix: no sample ids");
}

void CorrectnessMatrix::add_epoch(const std::vector<std::uint8_t>& correct) {
  if (correct.size() != ids_.size()) {
    throw std::invalid_argument("CorrectnessMatrix: epoch row size mismatch");
  }
  for (std::size_t i = 0; i < correct.size(); ++i) {
    correct_counts_[i] += correct[i] ? 1u : 0u;
  }
  ++epochs_;
}

double CorrectnessMatrix::fraction_correct(std::size_t row) const {
  if (epochs_ == 0) throw std::logic_error("CorrectnessMatrix: no epochs recorded");
  return static_cast<double>(correct_counts_[row]) / static_cast<double>(epochs_);
}

bool LearningSpeedTable::covers(const std::vector<std::int64_t>& ids) const {
  return std::all_of(ids.begin(), ids.end(),
                     [this](std::int64_t id) { return ls.count(id) != 0; });
}

double LearningSpeedTable::at(std::int64_t id) const {
  auto it = ls.find(id);
  if (it == ls.end()) {
    throw std::out_of_range("LearningSpeedTable: no entry for id " + std::to_string(id));
  }
  return it->second;
}

LearningSpeedTable record_learning_speed(const CorrectnessMatrix& matrix) {
  if (matrix.epoch_count() < 1) {
    throw std::invalid_argument("record_learning_speed: need at least one epoch");
  }
  LearningSpeedTable table;
  const auto& ids = matrix.ids();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    table.ls[ids[i]] = matrix.fraction_correct(i);
  }
  return table;
}

void write_learning_speed_csv(const LearningSpeedTable& table, std::ostream& out) {
  out << "id,ls\n";
  std::ostringstream os;
  os.precision(17);
  for (const auto& [id, ls] : table.ls) {
    os.str("");
    os << id << "," << ls;
    out << os.str() << "\n";
  }
}

void write_learning_speed_csv(const LearningSpeedTable& table, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  write_learning_speed_csv(table, f);
}

LearningSpeedTable read_learning_speed_csv(std::istream& in) {
  LearningSpeedTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("learning speed csv: missing header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("learning speed csv: bad row");
    table.ls[std::stoll(line.substr(0, comma))] = std::stod(line.substr(comma + 1));
  }
  return table;
}

std::string sampler_mode_name(SamplerMode m) {
  switch (m) {
    case SamplerMode::proportional: return "proportional";
    case SamplerMode::balanced_old_new: return "balanced_old_new";
    case SamplerMode::easy_hard: return "easy_hard";
  }
  return "proportional";
}

SamplerMode sampler_mode_from_name(const std::string& s) {
  if (s == "proportional") return SamplerMode::proportional;
  if (s == "balanced_old_new") return SamplerMode::balanced_old_new;
  if (s == "easy_hard") return SamplerMode::easy_hard;
  throw std::invalid_argument("unknown sampler mode: " + s);
}

void SamplerSpec::validate() const {
  if (affected_fraction < 0.0 || affected_fraction >= 1.0) {
    throw std::invalid_argument("SamplerSpec: affected_fraction must be in [0, 1)");
  }
  if (relative_weight < 0.0) {
    throw std::invalid_argument("SamplerSpec: relative_weight must be >= 0");
  }
}

std::map<std::int64_t, double> easy_hard_weights(const LearningSpeedTable& table,
                                                 double affected_fraction,
                                                 double relative_weight) {
  if (table.empty()) throw std::invalid_argument("easy_hard_weights: empty table");
  if (affected_fraction < 0.0 || affected_fraction >= 1.0) {
    throw std::invalid_argument("easy_hard_weights: affected fraction must be in [0, 1)");
  }
  if (relative_weight < 0.0) {
    throw std::invalid_argument("easy_hard_weights: relative weight must be >= 0");
  }

  // Easiest first: learning speed descending, ties by ascending id.
  std::vector<std::pair<std::int64_t, double>> order(table.ls.begin(), table.ls.end());
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  const std::size_t n = order.size();
  const std::size_t affected_each =
      static_cast<std::size_t>(affected_fraction / 2.0 * static_cast<double>(n));

  std::map<std::int64_t, double> weights;
  for (const auto& [id, ls] : order) weights[id] = 1.0;
  for (std::size_t i = 0; i < affected_each; ++i) {
    weights[order[i].first] = relative_weight;               // easiest
    weights[order[n - 1 - i].first] = relative_weight;       // hardest
  }
  return weights;
}

BatchSampler::BatchSampler(const SamplerSpec& spec, const Dataset& dataset)
    : dataset_(&dataset), mode_(spec.mode) {
  spec.validate();
  if (dataset.size() == 0) throw std::invalid_argument("BatchSampler: empty dataset");

  if (mode_ == SamplerMode::balanced_old_new) {
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      (dataset.samples[i].origin == Origin::old_data ? old_indices_ : new_indices_)
          .push_back(i);
    }
    if (old_indices_.empty() || new_indices_.empty()) {
      throw std::invalid_argument("BatchSampler: balanced mode requires both origins");
    }
    return;
  }

  std::map<std::int64_t, double> old_weights;
  if (mode_ == SamplerMode::easy_hard) {
    std::vector<std::int64_t> old_ids;
    for (const Sample& s : dataset.samples) {
      if (s.origin == Origin::old_data) old_ids.push_back(s.id);
    }
    if (!spec.learning_speed.covers(old_ids)) {
      throw std::invalid_argument(
          "BatchSampler: easy_hard requires learning speeds for all old samples");
    }
    // Order over the old-origin population only, even if the table covers more.
    LearningSpeedTable old_table;
    for (std::int64_t id : old_ids) old_table.ls[id] = spec.learning_speed.at(id);
    old_weights = easy_hard_weights(old_table, spec.affected_fraction,
                                    spec.relative_weight);
  }

  cumulative_.resize(dataset.size());
  double total = 0.0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const Sample& s = dataset.samples[i];
    double w = 1.0;
    if (mode_ == SamplerMode::easy_hard && s.origin == Origin::old_data) {
      w = old_weights.at(s.id);
    }
    total += w;
    cumulative_[i] = total;
  }
  if (total <= 0.0) throw std::invalid_argument("BatchSampler: all weights zero");
}

std::vector<std::size_t> BatchSampler::draw_indices(std::size_t batch_size, Rng& rng) const {
  if (batch_size == 0) throw std::invalid_argument("BatchSampler: batch_size must be >= 1");
  std::vector<std::size_t> out;
  out.reserve(batch_size);

  if (mode_ == SamplerMode::balanced_old_new) {
    const std::size_t n_old = batch_size / 2;
    const std::size_t n_new = batch_size - n_old;
    for (std::size_t i = 0; i < n_old; ++i) {
      out.push_back(old_indices_[rng.uniform_index(old_indices_.size())]);
    }
    for (std::size_t i = 0; i < n_new; ++i) {
      out.push_back(new_indices_[rng.uniform_index(new_indices_.size())]);
    }
    return out;
  }

  const double total = cumulative_.back();
  for (std::size_t i = 0; i < batch_size; ++i) {
    double u = rng.uniform() * total;
    // The product can round up to the total; keep u strictly inside so
    // zero-weight trailing samples stay unreachable.
    if (u >= total) u = std::nextafter(total, 0.0);
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    out.push_back(static_cast<std::size_t>(it - cumulative_.begin()));
  }
  return out;
}

std::vector<std::int64_t> BatchSampler::draw_ids(std::size_t batch_size, Rng& rng) const {
  std::vector<std::int64_t> ids;
  ids.reserve(batch_size);
  for (std::size_t idx : draw_indices(batch_size, rng)) {
    ids.push_back(dataset_->samples[idx].id);
  }
  return ids;
}

std::vector<double> BatchSampler::probabilities() const {
  if (mode_ == SamplerMode::balanced_old_new) {
    throw std::logic_error("BatchSampler: balanced mode has no single-draw distribution");
  }
  std::vector<double> probs(cumulative_.size());
  const double total = cumulative_.back();
  double prev = 0.0;
  for (std::size_t i = 0; i < cumulative_.size(); ++i) {
    probs[i] = (cumulative_[i] - prev) / total;
    prev = cumulative_[i];
  }
  return probs;
}

std::vector<std::int64_t> sample_batch(const SamplerSpec& spec, const Dataset& dataset,
                                       std::size_t batch_size, Rng& rng) {
  return BatchSampler(spec, dataset).draw_ids(batch_size, rng);
}

}  // namespace contrain
