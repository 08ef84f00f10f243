#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "contrain/dataset.hpp"
#include "contrain/train.hpp"

using namespace contrain;

namespace {

GaussianParams small_params() {
  GaussianParams p;
  p.classes = 5;
  p.dim = 8;
  p.train_per_class = 40;
  p.test_per_class = 15;
  p.spread = 1.0;
  return p;
}

// Quick classifier fit used by the statistical checks below.
double fit_and_score(const Dataset& train_set, const Dataset& test_set,
                     std::vector<std::size_t> hidden, std::int64_t iters,
                     std::uint64_t seed) {
  TrainSpec spec;
  spec.net.layer_widths.push_back(train_set.feature_dim());
  for (std::size_t h : hidden) spec.net.layer_widths.push_back(h);
  spec.net.layer_widths.push_back(train_set.class_count);
  spec.init.mode = InitMode::scratch;
  spec.init.random_seed = seed;
  spec.schedule.family = ScheduleFamily::constant;
  spec.schedule.lr_max = 0.01;
  spec.schedule.horizon = iters;
  spec.iterations = iters;
  spec.eval_every = iters > 0 ? iters : 1;
  spec.batch_size = 64;
  const TrainResult result = train(spec, train_set, test_set, nullptr, seed);
  return result.record.test_accuracy.back();
}

}  // namespace

TEST_CASE("gaussian generation is deterministic and id-disjoint") {
  const GaussianParams p = small_params();
  const auto [train_a, test_a] = gen_gaussian_classes(p, 42);
  const auto [train_b, test_b] = gen_gaussian_classes(p, 42);

  REQUIRE(train_a.size() == p.classes * p.train_per_class);
  REQUIRE(test_a.size() == p.classes * p.test_per_class);
  CHECK(train_a.ids() == train_b.ids());
  for (std::size_t i = 0; i < train_a.size(); ++i) {
    CHECK(train_a.samples[i].features == train_b.samples[i].features);
  }

  const auto [train_c, test_c] = gen_gaussian_classes(p, 43);
  bool any_diff = false;
  for (std::size_t i = 0; i < train_a.size() && !any_diff; ++i) {
    any_diff = train_a.samples[i].features != train_c.samples[i].features;
  }
  CHECK(any_diff);

  std::set<std::int64_t> ids;
  for (const auto& s : train_a.samples) ids.insert(s.id);
  for (const auto& s : test_a.samples) ids.insert(s.id);
  CHECK(ids.size() == train_a.size() + test_a.size());

  train_a.validate();
  test_a.validate();
}

TEST_CASE("degenerate generator params rejected") {
  GaussianParams p = small_params();
  p.classes = 1;
  CHECK_THROWS_AS(gen_gaussian_classes(p, 1), std::invalid_argument);
  p = small_params();
  p.train_per_class = 5;
  CHECK_THROWS_AS(gen_gaussian_classes(p, 1), std::invalid_argument);
}

TEST_CASE("near-zero spread is linearly separable") {
  GaussianParams p;
  p.classes = 2;
  p.dim = 8;
  p.train_per_class = 50;
  p.test_per_class = 25;
  p.spread = 1e-6;
  const auto [train_set, test_set] = gen_gaussian_classes(p, 7);
  const double acc = fit_and_score(train_set, test_set, {}, 300, 1);
  CHECK(acc == 1.0);
}

TEST_CASE("huge spread drives any classifier to chance level") {
  GaussianParams p;
  p.classes = 5;
  p.dim = 8;
  p.train_per_class = 60;
  p.test_per_class = 40;
  p.spread = 1e6;
  double total = 0.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto [train_set, test_set] = gen_gaussian_classes(p, seed);
    total += fit_and_score(train_set, test_set, {16}, 300, seed);
  }
  const double mean_acc = total / 3.0;
  CHECK(mean_acc > 0.05);
  CHECK(mean_acc < 0.4);  // chance is 0.2
}

TEST_CASE("split_by_class partitions classes disjointly and relabels globally") {
  GaussianParams p = small_params();
  p.classes = 10;
  const auto [train_set, test_set] = gen_gaussian_classes(p, 11);

  SUBCASE("7+3 split") {
    const auto groups = split_by_class(train_set, test_set, {7, 3}, 5);
    REQUIRE(groups.size() == 2);
    CHECK(groups[0].first.size() == 7 * p.train_per_class);
    CHECK(groups[1].first.size() == 3 * p.train_per_class);

    // Global contiguous label ranges per group.
    for (const auto& s : groups[0].first.samples) CHECK(s.label < 7);
    for (const auto& s : groups[1].first.samples) {
      CHECK(s.label >= 7);
      CHECK(s.label < 10);
    }
    CHECK(groups[0].first.class_count == 10);
    CHECK(groups[1].first.class_count == 10);
  }

  SUBCASE("identity split returns the whole set") {
    const auto groups = split_by_class(train_set, test_set, {10}, 5);
    REQUIRE(groups.size() == 1);
    CHECK(groups[0].first.size() == train_set.size());
    CHECK(groups[0].second.size() == test_set.size());
  }

  SUBCASE("split sum mismatch rejected") {
    CHECK_THROWS_AS(split_by_class(train_set, test_set, {7, 2}, 5), std::invalid_argument);
  }

  SUBCASE("groups are exhaustive and pairwise disjoint across seeds") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const auto groups = split_by_class(train_set, test_set, {4, 3, 3}, seed);
      std::set<std::int64_t> seen;
      std::size_t total = 0;
      for (const auto& [tr, te] : groups) {
        for (const auto& s : tr.samples) {
          CHECK(seen.insert(s.id).second);  // pairwise disjoint
          ++total;
        }
      }
      CHECK(total == train_set.size());  // exhaustive
    }
  }
}

TEST_CASE("domain shift") {
  GaussianParams p = small_params();
  const auto [train_set, test_set] = gen_gaussian_classes(p, 3);

  SUBCASE("zero shift is the exact identity on features") {
    const Dataset shifted = apply_domain_shift(train_set, {}, 9);
    REQUIRE(shifted.size() == train_set.size());
    for (std::size_t i = 0; i < shifted.size(); ++i) {
      CHECK(shifted.samples[i].features == train_set.samples[i].features);
      CHECK(shifted.samples[i].id != train_set.samples[i].id);  // fresh ids
    }
  }

  SUBCASE("labels are preserved elementwise") {
    ShiftParams shift{0.7, 1.5, 0.2};
    const Dataset shifted = apply_domain_shift(train_set, shift, 9);
    for (std::size_t i = 0; i < shifted.size(); ++i) {
      CHECK(shifted.samples[i].label == train_set.samples[i].label);
    }
  }

  SUBCASE("noise-free shift is an isometry (invertible)") {
    ShiftParams shift{0.9, 0.0, 0.0};
    const Dataset shifted = apply_domain_shift(train_set, shift, 9);
    for (std::size_t i = 0; i < 20; ++i) {
      for (std::size_t j = i + 1; j < 20; ++j) {
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t k = 0; k < p.dim; ++k) {
          const double a = train_set.samples[i].features[k] - train_set.samples[j].features[k];
          const double b = shifted.samples[i].features[k] - shifted.samples[j].features[k];
          d0 += a * a;
          d1 += b * b;
        }
        CHECK(std::abs(std::sqrt(d0) - std::sqrt(d1)) <= 1e-9);
      }
    }
  }

  SUBCASE("an old-domain model loses accuracy on the shifted test set") {
    ShiftParams shift{0.8, 1.0, 0.4};
    int drops = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      GaussianParams gp = small_params();
      gp.spread = 0.8;
      const auto [tr, te] = gen_gaussian_classes(gp, seed);

      TrainSpec spec;
      spec.net.layer_widths = {gp.dim, 24, gp.classes};
      spec.init.random_seed = seed;
      spec.schedule.horizon = 500;
      spec.iterations = 500;
      spec.eval_every = 500;
      spec.batch_size = 64;
      const TrainResult fit = train(spec, tr, te, nullptr, seed);

      const Dataset shifted_test = apply_domain_shift(te, shift, seed);
      const double plain_acc = accuracy(spec.net, fit.params, te);
      const double shifted_acc = accuracy(spec.net, fit.params, shifted_test);
      if (shifted_acc < plain_acc) ++drops;
    }
    CHECK(drops >= 4);
  }
}

TEST_CASE("merge semantics") {
  GaussianParams p = small_params();
  const auto [train_set, test_set] = gen_gaussian_classes(p, 21);
  const auto groups = split_by_class(train_set, test_set, {3, 2}, 4);
  const Dataset old_part = with_origin(groups[0].first, Origin::old_data);
  const Dataset new_part = with_origin(groups[1].first, Origin::new_data);

  SUBCASE("merge with empty is identity") {
    Dataset empty;
    empty.class_count = old_part.class_count;
    const Dataset merged = merge(old_part, empty);
    CHECK(merged.size() == old_part.size());
    CHECK(merged.ids() == old_part.ids());
  }

  SUBCASE("sizes add up and origin tags are preserved") {
    const Dataset merged = merge(old_part, new_part);
    CHECK(merged.size() == old_part.size() + new_part.size());
    CHECK(merged.count_origin(Origin::old_data) == old_part.size());
    CHECK(merged.count_origin(Origin::new_data) == new_part.size());
  }

  SUBCASE("id collision rejected") {
    CHECK_THROWS_WITH_AS(merge(old_part, old_part), doctest::Contains("id collision"),
                         std::invalid_argument);
  }
}

TEST_CASE("dataset csv round-trips") {
  GaussianParams p = small_params();
  p.classes = 3;
  p.train_per_class = 12;
  const auto [train_set, test_set] = gen_gaussian_classes(p, 77);
  const Dataset tagged = with_origin(train_set, Origin::new_data);

  std::ostringstream os;
  write_dataset_csv(tagged, os);
  std::istringstream is(os.str());
  const Dataset back = read_dataset_csv(is, tagged.class_count, tagged.role);

  REQUIRE(back.size() == tagged.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back.samples[i].id == tagged.samples[i].id);
    CHECK(back.samples[i].label == tagged.samples[i].label);
    CHECK(back.samples[i].origin == tagged.samples[i].origin);
    CHECK(back.samples[i].features == tagged.samples[i].features);
  }
}

TEST_CASE("scenario assembly") {
  ScenarioSpec spec;
  spec.gen = small_params();
  spec.gen.classes = 5;
  spec.splits = {3, 2};
  spec.seed = 100;

  SUBCASE("class-incremental layout and origin tags") {
    const ScenarioData d = build_scenario(spec, 1);
    CHECK(d.old_train.size() == 3 * spec.gen.train_per_class);
    CHECK(d.new_train.size() == 2 * spec.gen.train_per_class);
    CHECK(d.merged_train.size() == d.old_train.size() + d.new_train.size());
    CHECK(d.merged_train.count_origin(Origin::old_data) == d.old_train.size());
    CHECK(d.combined_test.size() == 5 * spec.gen.test_per_class);

    const ScenarioData d2 = build_scenario(spec, 1);
    CHECK(d2.merged_train.ids() == d.merged_train.ids());
  }

  SUBCASE("domain-shift layout keeps the class space") {
    ScenarioSpec ds = spec;
    ds.kind = ScenarioKind::domain_shift;
    ds.shift = {0.5, 0.5, 0.1};
    const ScenarioData d = build_scenario(ds, 1);
    CHECK(d.old_train.size() == d.new_train.size());
    CHECK(d.new_train.class_count == d.old_train.class_count);
    CHECK(d.combined_test.size() == 2 * 5 * spec.gen.test_per_class);
    for (std::size_t i = 0; i < d.old_train.size(); ++i) {
      CHECK(d.new_train.samples[i].label == d.old_train.samples[i].label);
    }
  }
}
