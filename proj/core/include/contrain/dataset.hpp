#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "contrain/tensor.hpp"

namespace contrain {

enum class Origin { old_data, new_data };
enum class Role { train, test };

std::string origin_name(Origin o);
Origin origin_from_name(const std::string& s);

struct Sample {
  std::int64_t id = 0;
  std::vector<double> features;
  std::size_t label = 0;
  Origin origin = Origin::old_data;
};

struct Dataset {
  std::vector<Sample> samples;
  std::size_t class_count = 0;
  Role role = Role::train;

  std::size_t size() const { return samples.size(); }
  std::size_t feature_dim() const { return samples.empty() ? 0 : samples[0].features.size(); }

  // Feature matrix [N x dim] and label vector, in sample order.
  Tensor feature_tensor() const;
  std::vector<std::size_t> labels() const;
  std::vector<std::int64_t> ids() const;

  std::size_t count_origin(Origin o) const;

  void validate() const;
};

// Synthetic class clusters: one isotropic Gaussian per class with a randomly
// drawn mean. Stands in for the image datasets at desk scale.
struct GaussianParams {
  std::size_t classes = 10;
  std::size_t dim = 32;
  std::size_t train_per_class = 500;
  std::size_t test_per_class = 100;
  double mean_scale = 1.0;  // class means ~ N(0, mean_scale^2 I)
  double spread = 2.0;      // samples ~ N(mean, spread^2 I)

  void validate() const;
};

// Deterministic per (params, seed). Train/test ids are disjoint.
std::pair<Dataset, Dataset> gen_gaussian_classes(const GaussianParams& params,
                                                 std::uint64_t seed);

// Partition classes into groups of the given sizes using a seeded random
// permutation. Labels are re-indexed into one global contiguous space so the
// output head never needs resizing: group 0 gets labels [0, splits[0]), group
// 1 the next range, and so on. Every returned dataset keeps the full
// class_count.
std::vector<std::pair<Dataset, Dataset>> split_by_class(const Dataset& train,
                                                        const Dataset& test,
                                                        const std::vector<std::size_t>& splits,
                                                        std::uint64_t seed);

// Simulated domain shift: fixed random rotation by `rotation_angle` (radians,
// applied in random planes), translation along a random direction, and
// additive Gaussian noise. Labels unchanged, fresh sample ids.
struct ShiftParams {
  double rotation_angle = 0.0;
  double translation_scale = 0.0;
  double noise_std = 0.0;

  void validate() const;
};

Dataset apply_domain_shift(const Dataset& dataset, const ShiftParams& shift,
                           std::uint64_t seed);

// Copy with every sample tagged with the given origin.
Dataset with_origin(Dataset dataset, Origin origin);

// Union of two datasets with origin tags preserved. Requires compatible
// feature dimensions and disjoint ids.
Dataset merge(const Dataset& old_part, const Dataset& new_part);

// CSV layout: header "id,origin,label,f0,...,f{dim-1}".
void write_dataset_csv(const Dataset& dataset, std::ostream& out);
void write_dataset_csv(const Dataset& dataset, const std::string& path);
Dataset read_dataset_csv(std::istream& in, std::size_t class_count, Role role);

// ---------------------------------------------------------------------------
// Scenario assembly: the two-phase data layout used by the harness.
// ---------------------------------------------------------------------------

enum class ScenarioKind { class_incremental, domain_shift };

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::class_incremental;
  GaussianParams gen;
  std::vector<std::size_t> splits = {7, 3};  // class_incremental: old/new class counts
  ShiftParams shift;                         // domain_shift
  std::uint64_t seed = 0;

  void validate() const;
};

// All datasets for one run seed: phase 1 trains on old_train, phase 2 on
// merged_train, and every evaluation uses combined_test.
struct ScenarioData {
  Dataset old_train, old_test;
  Dataset new_train, new_test;
  Dataset merged_train;
  Dataset combined_test;
};

ScenarioData build_scenario(const ScenarioSpec& spec, std::uint64_t run_seed);

}  // namespace contrain
