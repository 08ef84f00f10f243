#include "contrain/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "contrain/rng.hpp"

namespace contrain {

namespace {
// Fresh ids for transformed copies of a dataset stay clear of generator ids.
constexpr std::int64_t kShiftIdOffset = std::int64_t{1} << 32;
}  // namespace

std::string origin_name(Origin o) { return o == Origin::old_data ? "old" : "new"; }

Origin origin_from_name(const std::string& s) {
  if (s == "old") return Origin::old_data;
  if (s == "new") return Origin::new_data;
  throw std::invalid_argument("unknown origin tag: " + s);
}

Tensor Dataset::feature_tensor() const {
  const std::size_t n = size();
  const std::size_t d = feature_dim();
  Tensor t = Tensor::zeros({n, d});
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(samples[i].features.begin(), samples[i].features.end(), &t.data[i * d]);
  }
  return t;
}

std::vector<std::size_t> Dataset::labels() const {
  std::vector<std::size_t> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = samples[i].label;
  return out;
}

std::vector<std::int64_t> Dataset::ids() const {
  std::vector<std::int64_t> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = samples[i].id;
  return out;
}

std::size_t Dataset::count_origin(Origin o) const {
  return static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(),
                    [o](const Sample& s) { return s.origin == o; }));
}

void Dataset::validate() const {
  std::unordered_set<std::int64_t> seen;
  const std::size_t d = feature_dim();
  for (const Sample& s : samples) {
    if (s.label >= class_count) throw std::invalid_argument("Dataset: label out of range");
    if (s.features.size() != d) throw std::invalid_argument("Dataset: ragged features");
    if (!seen.insert(s.id).second) {
      throw std::invalid_argument("Dataset: duplicate sample id " + std::to_string(s.id));
    }
  }
}

void GaussianParams::validate() const {
  if (classes < 2) throw std::invalid_argument("GaussianParams: classes must be >= 2");
  if (dim < 2) throw std::invalid_argument("GaussianParams: dim must be >= 2");
  if (train_per_class < 10) {
    throw std::invalid_argument("GaussianParams: train_per_class must be >= 10");
  }
  if (test_per_class == 0) throw std::invalid_argument("GaussianParams: test_per_class == 0");
  if (!(spread >= 0.0) || !std::isfinite(spread)) {
    throw std::invalid_argument("GaussianParams: bad spread");
  }
}

std::pair<Dataset, Dataset> gen_gaussian_classes(const GaussianParams& params,
                                                 std::uint64_t seed) {
  params.validate();
  Rng rng(derive_seed(seed, "gaussian_gen"));

  Dataset train, test;
  train.class_count = test.class_count = params.classes;
  train.role = Role::train;
  test.role = Role::test;

  std::int64_t next_train_id = 0;
  std::int64_t next_test_id =
      static_cast<std::int64_t>(params.classes * params.train_per_class);

  for (std::size_t c = 0; c < params.classes; ++c) {
    std::vector<double> mean(params.dim);
    for (double& m : mean) m = rng.normal(0.0, params.mean_scale);

    auto draw_sample = [&](std::int64_t id) {
      Sample s;
      s.id = id;
      s.label = c;
      s.origin = Origin::old_data;
      s.features.resize(params.dim);
      for (std::size_t k = 0; k < params.dim; ++k) {
        s.features[k] = mean[k] + rng.normal(0.0, params.spread);
      }
      return s;
    };

    for (std::size_t i = 0; i < params.train_per_class; ++i) {
      train.samples.push_back(draw_sample(next_train_id++));
    }
    for (std::size_t i = 0; i < params.test_per_class; ++i) {
      test.samples.push_back(draw_sample(next_test_id++));
    }
  }
  return {std::move(train), std::move(test)};
}

std::vector<std::pair<Dataset, Dataset>> split_by_class(const Dataset& train,
                                                        const Dataset& test,
                                                        const std::vector<std::size_t>& splits,
                                                        std::uint64_t seed) {
  const std::size_t total = std::accumulate(splits.begin(), splits.end(), std::size_t{0});
  if (total != train.class_count) {
    throw std::invalid_argument("split_by_class: splits sum to " + std::to_string(total) +
                                ", expected " + std::to_string(train.class_count));
  }
  for (std::size_t s : splits) {
    if (s == 0) throw std::invalid_argument("split_by_class: empty group");
  }

  // Seeded Fisher-Yates permutation of the class ids.
  std::vector<std::size_t> perm(train.class_count);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(derive_seed(seed, "class_split"));
  for (std::size_t i = perm.size(); i > 1; --i) {
    std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
  }

  // Global contiguous relabeling: position in the permutation is the new label.
  std::vector<std::size_t> new_label(train.class_count);
  std::vector<std::size_t> group_of(train.class_count);
  std::size_t cursor = 0;
  for (std::size_t g = 0; g < splits.size(); ++g) {
    for (std::size_t j = 0; j < splits[g]; ++j, ++cursor) {
      new_label[perm[cursor]] = cursor;
      group_of[perm[cursor]] = g;
    }
  }

  std::vector<std::pair<Dataset, Dataset>> groups(splits.size());
  for (auto& [tr, te] : groups) {
    tr.class_count = te.class_count = train.class_count;
    tr.role = Role::train;
    te.role = Role::test;
  }
  for (const Sample& s : train.samples) {
    Sample copy = s;
    copy.label = new_label[s.label];
    groups[group_of[s.label]].first.samples.push_back(std::move(copy));
  }
  for (const Sample& s : test.samples) {
    Sample copy = s;
    copy.label = new_label[s.label];
    groups[group_of[s.label]].second.samples.push_back(std::move(copy));
  }
  return groups;
}

void ShiftParams::validate() const {
  if (!std::isfinite(rotation_angle) || !std::isfinite(translation_scale) ||
      !std::isfinite(noise_std) || noise_std < 0.0) {
    throw std::invalid_argument("ShiftParams: parameters must be finite, noise_std >= 0");
  }
}

namespace {

// Random orthonormal basis via Gram-Schmidt on a Gaussian matrix.
std::vector<std::vector<double>> random_orthonormal(std::size_t dim, Rng& rng) {
  std::vector<std::vector<double>> q(dim, std::vector<double>(dim));
  for (auto& row : q) {
    for (double& v : row) v = rng.normal();
  }
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < dim; ++k) dot += q[i][k] * q[j][k];
      for (std::size_t k = 0; k < dim; ++k) q[i][k] -= dot * q[j][k];
    }
    double norm = 0.0;
    for (double v : q[i]) norm += v * v;
    norm = std::sqrt(norm);
    if (norm < 1e-12) throw std::runtime_error("random_orthonormal: degenerate draw");
    for (double& v : q[i]) v /= norm;
  }
  return q;
}

}  // namespace

Dataset apply_domain_shift(const Dataset& dataset, const ShiftParams& shift,
                           std::uint64_t seed) {
  shift.validate();
  const std::size_t dim = dataset.feature_dim();
  Rng rng(derive_seed(seed, "domain_shift"));

  // R = Q^T B Q with B rotating consecutive coordinate pairs by the angle.
  // Built only when the angle is nonzero so the zero-shift case is exact.
  std::vector<std::vector<double>> rot;
  if (shift.rotation_angle != 0.0) {
    const auto q = random_orthonormal(dim, rng);
    const double c = std::cos(shift.rotation_angle);
    const double s = std::sin(shift.rotation_angle);
    std::vector<std::vector<double>> bq(dim, std::vector<double>(dim, 0.0));
    for (std::size_t p = 0; p + 1 < dim; p += 2) {
      for (std::size_t k = 0; k < dim; ++k) {
        bq[p][k] = c * q[p][k] - s * q[p + 1][k];
        bq[p + 1][k] = s * q[p][k] + c * q[p + 1][k];
      }
    }
    if (dim % 2 == 1) bq[dim - 1] = q[dim - 1];
    rot.assign(dim, std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t k = 0; k < dim; ++k) {
        for (std::size_t j = 0; j < dim; ++j) rot[i][j] += q[k][i] * bq[k][j];
      }
    }
  }

  std::vector<double> translation(dim, 0.0);
  if (shift.translation_scale != 0.0) {
    double norm = 0.0;
    for (double& v : translation) {
      v = rng.normal();
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : translation) v *= shift.translation_scale / norm;
  }

  Dataset out;
  out.class_count = dataset.class_count;
  out.role = dataset.role;
  out.samples.reserve(dataset.size());
  std::vector<double> buf(dim);
  for (const Sample& s : dataset.samples) {
    Sample copy = s;
    copy.id = s.id + kShiftIdOffset;
    if (!rot.empty()) {
      for (std::size_t i = 0; i < dim; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < dim; ++j) acc += rot[i][j] * s.features[j];
        buf[i] = acc;
      }
      copy.features = buf;
    }
    if (shift.translation_scale != 0.0) {
      for (std::size_t i = 0; i < dim; ++i) copy.features[i] += translation[i];
    }
    if (shift.noise_std != 0.0) {
      for (std::size_t i = 0; i < dim; ++i) {
        copy.features[i] += rng.normal(0.0, shift.noise_std);
      }
    }
    out.samples.push_back(std::move(copy));
  }
  return out;
}

Dataset with_origin(Dataset dataset, Origin origin) {
  for (Sample& s : dataset.samples) s.origin = origin;
  return dataset;
}

Dataset merge(const Dataset& old_part, const Dataset& new_part) {
  if (!old_part.samples.empty() && !new_part.samples.empty() &&
      old_part.feature_dim() != new_part.feature_dim()) {
    throw std::invalid_argument("merge: feature dimension mismatch");
  }
  Dataset out = old_part;
  out.class_count = std::max(old_part.class_count, new_part.class_count);
  std::unordered_set<std::int64_t> seen;
  for (const Sample& s : old_part.samples) seen.insert(s.id);
  for (const Sample& s : new_part.samples) {
    if (!seen.insert(s.id).second) {
      throw std::invalid_argument("merge: id collision on " + std::to_string(s.id));
    }
    out.samples.push_back(s);
  }
  return out;
}

void write_dataset_csv(const Dataset& dataset, std::ostream& out) {
  const std::size_t d = dataset.feature_dim();
  out << "id,origin,label";
  for (std::size_t k = 0; k < d; ++k) out << ",f" << k;
  out << "\n";
  std::ostringstream os;
  os.precision(17);
  for (const Sample& s : dataset.samples) {
    os.str("");
    os << s.id << "," << origin_name(s.origin) << "," << s.label;
    for (double v : s.features) os << "," << v;
    out << os.str() << "\n";
  }
}

void write_dataset_csv(const Dataset& dataset, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  write_dataset_csv(dataset, f);
}

Dataset read_dataset_csv(std::istream& in, std::size_t class_count, Role role) {
  Dataset out;
  out.class_count = class_count;
  out.role = role;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset csv: missing header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    Sample s;
    std::getline(ls, field, ',');
    s.id = std::stoll(field);
    std::getline(ls, field, ',');
    s.origin = origin_from_name(field);
    std::getline(ls, field, ',');
    s.label = static_cast<std::size_t>(std::stoull(field));
    while (std::getline(ls, field, ',')) s.features.push_back(std::stod(field));
    out.samples.push_back(std::move(s));
  }
  out.validate();
  return out;
}

void ScenarioSpec::validate() const {
  gen.validate();
  if (kind == ScenarioKind::class_incremental) {
    const std::size_t total = std::accumulate(splits.begin(), splits.end(), std::size_t{0});
    if (splits.size() < 2) {
      throw std::invalid_argument("ScenarioSpec: class_incremental needs >= 2 splits");
    }
    if (total != gen.classes) {
      throw std::invalid_argument("ScenarioSpec: splits must sum to class count");
    }
  } else {
    shift.validate();
  }
}

ScenarioData build_scenario(const ScenarioSpec& spec, std::uint64_t run_seed) {
  spec.validate();
  const std::uint64_t data_seed = derive_seed(spec.seed, run_seed);

  ScenarioData d;
  auto [train, test] = gen_gaussian_classes(spec.gen, data_seed);

  if (spec.kind == ScenarioKind::class_incremental) {
    // First group is the old data, the remaining groups together are new.
    auto groups = split_by_class(train, test, spec.splits, derive_seed(data_seed, "split"));
    d.old_train = with_origin(std::move(groups[0].first), Origin::old_data);
    d.old_test = with_origin(std::move(groups[0].second), Origin::old_data);
    Dataset new_train, new_test;
    new_train.class_count = new_test.class_count = train.class_count;
    new_train.role = Role::train;
    new_test.role = Role::test;
    for (std::size_t g = 1; g < groups.size(); ++g) {
      new_train = merge(new_train, groups[g].first);
      new_test = merge(new_test, groups[g].second);
    }
    d.new_train = with_origin(std::move(new_train), Origin::new_data);
    d.new_test = with_origin(std::move(new_test), Origin::new_data);
  } else {
    d.old_train = with_origin(train, Origin::old_data);
    d.old_test = with_origin(test, Origin::old_data);
    const std::uint64_t shift_seed = derive_seed(data_seed, "shift");
    d.new_train = with_origin(apply_domain_shift(train, spec.shift, shift_seed),
                              Origin::new_data);
    d.new_test = with_origin(apply_domain_shift(test, spec.shift, shift_seed),
                             Origin::new_data);
  }

  d.merged_train = merge(d.old_train, d.new_train);
  d.combined_test = merge(d.old_test, d.new_test);
  d.combined_test.role = Role::test;
  return d;
}

}  // namespace contrain
