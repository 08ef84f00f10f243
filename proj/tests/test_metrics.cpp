#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <optional>

#include "contrain/metrics.hpp"
#include "contrain/rng.hpp"

using namespace contrain;

namespace {

LearningCurve curve(std::vector<std::int64_t> iters, std::vector<double> acc) {
  return LearningCurve{std::move(iters), std::move(acc)};
}

// Independent oracle: plain linear scan, written apart from the library path.
std::optional<std::int64_t> speed_oracle(const LearningCurve& c, double target) {
  for (std::size_t i = 0; i < c.iters.size(); ++i) {
    if (c.acc[i] >= target) return c.iters[i];
  }
  return std::nullopt;
}

LearningCurve random_curve(Rng& rng) {
  const std::size_t points = 1 + rng.uniform_index(30);
  LearningCurve c;
  std::int64_t it = static_cast<std::int64_t>(rng.uniform_index(50));
  for (std::size_t i = 0; i < points; ++i) {
    c.iters.push_back(it);
    it += 1 + static_cast<std::int64_t>(rng.uniform_index(100));
    c.acc.push_back(rng.uniform());
  }
  return c;
}

RunRecord record_with(std::string arm, std::uint64_t seed, std::vector<std::int64_t> iters,
                      std::vector<double> acc) {
  RunRecord r;
  r.arm = std::move(arm);
  r.seed = seed;
  r.eval_iters = std::move(iters);
  r.test_accuracy = std::move(acc);
  return r;
}

}  // namespace

TEST_CASE("speed: first recorded crossing") {
  const LearningCurve c = curve({100, 200}, {0.5, 0.7});
  CHECK(speed(c, 0.6) == 200);
  CHECK(speed(c, 0.0) == 100);  // degenerate target: first recorded iteration
  CHECK_FALSE(speed(curve({10, 20}, {0.8, 0.9}), 1.0).has_value());
  CHECK_THROWS_AS(speed(c, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(speed(LearningCurve{}, 0.5), std::invalid_argument);
}

TEST_CASE("relative speed-up reproduces the worked example L_99 = 2") {
  // Scratch reaches a_scratch = 0.8 at iteration 1000; f reaches
  // 0.99 * 0.8 = 0.792 at iteration 500.
  const LearningCurve scratch = curve({500, 1000}, {0.70, 0.80});
  const LearningCurve f = curve({500, 1000}, {0.792, 0.795});
  const auto l99 = relative_speedup(f, scratch, 0.8, 99.0);
  REQUIRE(l99.has_value());
  CHECK(*l99 == 2.0);

  SUBCASE("self comparison is exactly 1 at r=100") {
    const auto l100 = relative_speedup(scratch, scratch, 0.8, 100.0);
    REQUIRE(l100.has_value());
    CHECK(*l100 == 1.0);
  }

  SUBCASE("sentinel propagates instead of fabricating a number") {
    const LearningCurve low = curve({500, 1000}, {0.1, 0.2});
    CHECK_FALSE(relative_speedup(low, scratch, 0.8, 99.0).has_value());
    CHECK_FALSE(relative_speedup(f, low, 0.8, 99.0).has_value());  // scratch unreached
  }

  SUBCASE("r outside (0, 100] rejected") {
    CHECK_THROWS_AS(relative_speedup(f, scratch, 0.8, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(relative_speedup(f, scratch, 0.8, 101.0), std::invalid_argument);
  }
}

TEST_CASE("speed agrees with the brute-force oracle on 1e4 random curves") {
  Rng rng(6021);
  for (int i = 0; i < 10000; ++i) {
    const LearningCurve c = random_curve(rng);
    const double target = rng.uniform();
    CHECK(speed(c, target) == speed_oracle(c, target));
  }
}

TEST_CASE("relative speed-up matches an oracle composition on random curves") {
  Rng rng(6022);
  for (int i = 0; i < 2000; ++i) {
    const LearningCurve f = random_curve(rng);
    const LearningCurve scratch = random_curve(rng);
    const double a_scratch = rng.uniform();
    const double r = 1.0 + rng.uniform() * 99.0;

    const auto got = relative_speedup(f, scratch, a_scratch, r);
    const auto s_scr = speed_oracle(scratch, a_scratch);
    const auto s_f = speed_oracle(f, r / 100.0 * a_scratch);
    if (!s_scr || !s_f) {
      CHECK_FALSE(got.has_value());
    } else {
      REQUIRE(got.has_value());
      if (*s_f == 0) {
        CHECK(std::isinf(*got));
      } else {
        CHECK(*got == static_cast<double>(*s_scr) / static_cast<double>(*s_f));
      }
    }
  }
}

TEST_CASE("L_r is monotone in r and scale-invariant") {
  Rng rng(6023);
  int compared = 0;
  for (int i = 0; i < 2000; ++i) {
    const LearningCurve f = random_curve(rng);
    const LearningCurve scratch = random_curve(rng);
    const double a_scratch = 0.2 + 0.6 * rng.uniform();

    const auto l99 = relative_speedup(f, scratch, a_scratch, 99.0);
    const auto l100 = relative_speedup(f, scratch, a_scratch, 100.0);
    if (l99 && l100 && !std::isinf(*l99) && !std::isinf(*l100)) {
      CHECK(*l99 >= *l100);
      ++compared;
    }

    if (l100) {
      LearningCurve f2 = f, scratch2 = scratch;
      for (auto& it : f2.iters) it *= 7;
      for (auto& it : scratch2.iters) it *= 7;
      const auto scaled = relative_speedup(f2, scratch2, a_scratch, 100.0);
      REQUIRE(scaled.has_value());
      CHECK(*scaled == *l100);
    }
  }
  CHECK(compared > 100);  // the property was actually exercised
}

TEST_CASE("aggregate computes seed-mean curves and standard errors") {
  std::map<std::string, std::vector<RunRecord>> by_arm;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    by_arm["scratch"].push_back(
        record_with("scratch", seed, {0, 10, 20}, {0.1, 0.5, 0.8}));
  }
  by_arm["fast"] = {record_with("fast", 1, {0, 10, 20}, {0.1, 0.8, 0.8}),
                    record_with("fast", 2, {0, 10, 20}, {0.3, 0.9, 0.9})};

  const SpeedReport report = aggregate(by_arm, "scratch", {99, 100}, TargetMode::final_acc);
  CHECK(report.a_scratch == 0.8);
  CHECK(report.eval_cadence == 10);
  REQUIRE(report.arms.size() == 2);

  const ArmSummary& fast = report.arms[0];
  const ArmSummary& scratch = report.arms[1];
  CHECK(fast.arm == "fast");
  CHECK(scratch.arm == "scratch");

  SUBCASE("identical records have zero standard error") {
    for (double e : scratch.std_error) CHECK(e == 0.0);
  }

  SUBCASE("mean curve is the arithmetic mean per iteration") {
    CHECK(fast.mean_curve.acc[0] == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(fast.mean_curve.acc[1] == doctest::Approx(0.85).epsilon(1e-15));
  }

  SUBCASE("metrics are computed on the mean curve") {
    REQUIRE(fast.l_r.at(100).has_value());
    // scratch hits 0.8 at iteration 20, fast's mean hits it at 10.
    CHECK(*fast.l_r.at(100) == 2.0);
    CHECK(*scratch.l_r.at(100) == 1.0);
  }

  SUBCASE("mismatched eval grids rejected") {
    auto bad = by_arm;
    bad["fast"].push_back(record_with("fast", 3, {0, 5, 20}, {0.1, 0.2, 0.3}));
    CHECK_THROWS_AS(aggregate(bad, "scratch", {100}, TargetMode::final_acc),
                    std::invalid_argument);
  }

  SUBCASE("missing scratch arm rejected") {
    CHECK_THROWS_AS(aggregate(by_arm, "nope", {100}, TargetMode::final_acc),
                    std::invalid_argument);
  }

  SUBCASE("max target mode uses the curve maximum") {
    auto arms = by_arm;
    arms["scratch"].clear();
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      arms["scratch"].push_back(
          record_with("scratch", seed, {0, 10, 20}, {0.1, 0.9, 0.8}));
    }
    const SpeedReport r2 = aggregate(arms, "scratch", {100}, TargetMode::max_acc);
    CHECK(r2.a_scratch == doctest::Approx(0.9).epsilon(1e-15));
  }
}

TEST_CASE("report renderings carry the sentinel through") {
  std::map<std::string, std::vector<RunRecord>> by_arm;
  by_arm["scratch"] = {record_with("scratch", 1, {0, 10}, {0.2, 0.9})};
  by_arm["slow"] = {record_with("slow", 1, {0, 10}, {0.1, 0.3})};
  const SpeedReport report = aggregate(by_arm, "scratch", {99, 100}, TargetMode::final_acc);

  const std::string md = report_markdown(report);
  CHECK(md.find("| slow |") != std::string::npos);
  CHECK(md.find("/") != std::string::npos);
  CHECK(md.find("Max Acc") != std::string::npos);

  const std::string csv = report_csv(report);
  CHECK(csv.rfind("arm,seeds,max_acc,s_99,s_100,L_99,L_100\n", 0) == 0);
  CHECK(csv.find("slow,1,") != std::string::npos);
  CHECK(csv.find("/") != std::string::npos);
}
