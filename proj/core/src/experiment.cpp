#include "contrain/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>

#include "contrain/report.hpp"
#include "contrain/serialize.hpp"

namespace contrain {

namespace fs = std::filesystem;

namespace {

bool valid_name(const std::string& name) {
  if (name.empty()) return false;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

// Run the jobs on up to `workers` threads; rethrows the first failure.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string fmt_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

void ArmSpec::validate() const {
  if (!valid_name(name)) {
    throw std::invalid_argument("ArmSpec: invalid arm name '" + name + "'");
  }
  init.validate();
  if (lambda < 0.0) throw std::invalid_argument("ArmSpec: lambda < 0");
  if (affected_fraction < 0.0 || affected_fraction >= 1.0) {
    throw std::invalid_argument("ArmSpec: c must be in [0, 1)");
  }
  if (relative_weight < 0.0) throw std::invalid_argument("ArmSpec: r must be >= 0");
  if (schedule_multiplier <= 0.0) {
    throw std::invalid_argument("ArmSpec: schedule multiplier must be > 0");
  }
}

void ExperimentConfig::validate() const {
  scenario.validate();
  if (hidden_widths.empty()) {
    throw std::invalid_argument("ExperimentConfig: no hidden widths");
  }
  if (arms.empty()) throw std::invalid_argument("ExperimentConfig: no arms");
  std::set<std::string> names;
  for (const ArmSpec& arm : arms) {
    arm.validate();
    if (!names.insert(arm.name).second) {
      throw std::invalid_argument("ExperimentConfig: duplicate arm name " + arm.name);
    }
  }
  if (names.count(scratch_arm) == 0) {
    throw std::invalid_argument("ExperimentConfig: scratch arm '" + scratch_arm +
                                "' not among arms");
  }
  if (seeds.empty()) throw std::invalid_argument("ExperimentConfig: no seeds");
  if (iterations < 0 || phase1_iterations < 0) {
    throw std::invalid_argument("ExperimentConfig: negative iteration budget");
  }
  if (batch_size == 0) throw std::invalid_argument("ExperimentConfig: batch_size == 0");
  if (r_list.empty()) throw std::invalid_argument("ExperimentConfig: empty r list");
  for (int r : r_list) {
    if (r <= 0 || r > 100) throw std::invalid_argument("ExperimentConfig: r outside (0,100]");
  }

  // Fail fast: easy_hard arms need a learning-speed source.
  const std::size_t old_classes = scenario.kind == ScenarioKind::class_incremental
                                      ? scenario.splits.front()
                                      : scenario.gen.classes;
  const std::int64_t phase1_epoch =
      iterations_per_epoch(old_classes * scenario.gen.train_per_class, batch_size);
  for (const ArmSpec& arm : arms) {
    if (arm.sampler_mode != SamplerMode::easy_hard) continue;
    if (arm.init.scratch_base || arm.init.mode == InitMode::scratch) {
      const std::int64_t warmup_iters = easy_hard_warmup_epochs * phase1_epoch;
      if (easy_hard_warmup_epochs < 1 || iterations < warmup_iters) {
        throw std::invalid_argument("ExperimentConfig: arm '" + arm.name +
                                    "' (easy_hard from scratch) needs warmup epochs "
                                    "within the iteration budget");
      }
    } else if (phase1_iterations < phase1_epoch) {
      throw std::invalid_argument("ExperimentConfig: arm '" + arm.name +
                                  "' needs a phase-1 learning-speed recording, but "
                                  "phase1_iterations is below one epoch");
    }
  }
}

NetworkSpec ExperimentConfig::network() const {
  NetworkSpec net;
  net.layer_widths.push_back(scenario.gen.dim);
  for (std::size_t w : hidden_widths) net.layer_widths.push_back(w);
  net.layer_widths.push_back(scenario.gen.classes);
  return net;
}

std::int64_t ExperimentConfig::effective_eval_every(std::size_t train_size) const {
  if (eval_every > 0) return eval_every;
  return iterations_per_epoch(train_size, batch_size);
}

std::vector<ArmSpec> standard_arms() {
  ArmSpec scratch;
  scratch.name = "scratch";
  scratch.init.mode = InitMode::scratch;

  ArmSpec naive;
  naive.name = "naive";
  naive.init.mode = InitMode::naive;

  ArmSpec combined;
  combined.name = "combined";
  combined.init.mode = InitMode::shrink_perturb;
  combined.reg_mode = RegMode::l2_init;
  combined.lambda = 0.01;
  combined.sampler_mode = SamplerMode::easy_hard;
  combined.affected_fraction = 0.2;
  combined.relative_weight = 0.1;
  combined.schedule_multiplier = 0.25;

  ArmSpec scratch_sched;
  scratch_sched.name = "scratch_x025";
  scratch_sched.init.mode = InitMode::scratch;
  scratch_sched.schedule_multiplier = 0.25;

  return {scratch, naive, combined, scratch_sched};
}

std::vector<ArmSpec> ablation_grid_arms() {
  struct Row {
    const char* suffix;
    bool init, reg, data, sched;
  };
  const Row rows[] = {
      {"", false, false, false, false},
      {"init", true, false, false, false},
      {"reg", false, true, false, false},
      {"data", false, false, true, false},
      {"sched", false, false, false, true},
      {"init_reg", true, true, false, false},
      {"init_data", true, false, true, false},
      {"reg_data", false, true, true, false},
      {"init_reg_data", true, true, true, false},
      {"init_reg_data_sched", true, true, true, true},
  };

  std::vector<ArmSpec> arms;
  for (bool continuous : {true, false}) {
    for (const Row& row : rows) {
      ArmSpec arm;
      if (continuous) {
        arm.name = row.suffix[0] ? std::string("cont_") + row.suffix : "naive";
        arm.init.mode = row.init ? InitMode::shrink_perturb : InitMode::naive;
      } else {
        arm.name = row.suffix[0] ? std::string("scratch_") + row.suffix : "scratch";
        arm.init.mode = row.init ? InitMode::shrink_perturb : InitMode::scratch;
        arm.init.scratch_base = row.init;
      }
      if (row.reg) {
        arm.reg_mode = RegMode::l2_init;
        arm.lambda = 0.01;
      }
      if (row.data) {
        arm.sampler_mode = SamplerMode::easy_hard;
        arm.affected_fraction = 0.2;
        arm.relative_weight = 0.1;
      }
      if (row.sched) arm.schedule_multiplier = 0.25;
      arms.push_back(std::move(arm));
    }
  }
  return arms;
}

ExperimentConfig desk_config() {
  ExperimentConfig c;
  c.scenario.kind = ScenarioKind::class_incremental;
  c.scenario.gen.classes = 10;
  c.scenario.gen.dim = 32;
  c.scenario.gen.train_per_class = 500;
  c.scenario.gen.test_per_class = 100;
  c.scenario.gen.mean_scale = 1.0;
  c.scenario.gen.spread = 2.0;
  c.scenario.splits = {7, 3};
  c.scenario.seed = 1902;
  c.hidden_widths = {64};
  c.arms = standard_arms();
  c.seeds = {1, 2, 3, 4, 5};
  c.iterations = 4000;
  c.phase1_iterations = 3000;
  c.eval_every = 0;
  c.batch_size = 128;
  c.out_dir = "out_desk";
  return c;
}

std::string fingerprint_of(const std::string& canonical_json) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_json) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

namespace {

// Shared-by-design seed chain: task 0 is phase 1, task 1 the continuous
// phase. Arms at the same task share the init and sampler streams so that
// comparisons run on common random numbers.
std::uint64_t task_seed(std::uint64_t run_seed, std::size_t task, std::string_view what) {
  return derive_seed(run_seed, "task" + std::to_string(task) + "_" + std::string(what));
}

SchedulerSpec make_schedule(const ExperimentConfig& config, std::int64_t horizon,
                            double multiplier) {
  SchedulerSpec s;
  s.family = config.schedule_family;
  s.lr_max = config.lr_max;
  s.lr_min = config.lr_min;
  s.horizon = std::max<std::int64_t>(1, horizon);
  s.multiplier = multiplier;
  s.milestones = config.milestones;
  s.gamma = config.gamma;
  return s;
}

TrainSpec phase1_train_spec(const ExperimentConfig& config, std::uint64_t run_seed,
                            std::size_t old_train_size) {
  TrainSpec t;
  t.net = config.network();
  t.init.mode = InitMode::scratch;
  t.init.random_seed = task_seed(run_seed, 0, "init");
  t.sampler.mode = SamplerMode::proportional;
  t.schedule = make_schedule(config, config.phase1_iterations, 1.0);
  t.optimizer = config.optimizer;
  t.iterations = config.phase1_iterations;
  t.eval_every = config.effective_eval_every(old_train_size);
  t.batch_size = config.batch_size;
  t.record_learning_speed = true;
  return t;
}

TrainSpec arm_train_spec(const ExperimentConfig& config, const ArmSpec& arm,
                         std::uint64_t run_seed, std::size_t merged_size,
                         const LearningSpeedTable& phase1_table) {
  TrainSpec t;
  t.net = config.network();
  t.init = arm.init;
  t.init.random_seed = task_seed(run_seed, 1, "init");
  t.reg_mode = arm.reg_mode;
  t.lambda = arm.lambda;
  t.sampler.mode = arm.sampler_mode;
  t.sampler.affected_fraction = arm.affected_fraction;
  t.sampler.relative_weight = arm.relative_weight;
  const bool from_scratch = arm.init.mode == InitMode::scratch || arm.init.scratch_base;
  if (arm.sampler_mode == SamplerMode::easy_hard) {
    if (from_scratch) {
      t.easy_hard_warmup_epochs = config.easy_hard_warmup_epochs;
    } else {
      t.sampler.learning_speed = phase1_table;
    }
  }
  t.schedule = make_schedule(config, config.iterations, arm.schedule_multiplier);
  t.optimizer = config.optimizer;
  t.iterations = config.iterations;
  t.eval_every = config.effective_eval_every(merged_size);
  t.batch_size = config.batch_size;
  return t;
}

}  // namespace

std::string phase1_config_json(const ExperimentConfig& config) {
  ExperimentConfig trimmed = config;
  trimmed.arms = {ArmSpec{}};
  trimmed.arms[0].name = "phase1";
  trimmed.seeds = {0};
  trimmed.iterations = 0;
  trimmed.r_list = {100};
  trimmed.target_mode = TargetMode::final_acc;
  trimmed.scratch_arm = "phase1";
  trimmed.out_dir = "";
  return serialize_experiment_config(trimmed);
}

std::string arm_config_json(const ExperimentConfig& config, const ArmSpec& arm) {
  ExperimentConfig trimmed = config;
  trimmed.arms = {arm};
  trimmed.seeds = {0};
  trimmed.r_list = {100};
  trimmed.target_mode = TargetMode::final_acc;
  trimmed.scratch_arm = arm.name;
  trimmed.out_dir = "";
  return serialize_experiment_config(trimmed);
}

ScenarioResult run_scenario(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();

  const fs::path out_dir(config.out_dir);
  if (options.persist) {
    fs::create_directories(out_dir / "records");
    fs::create_directories(out_dir / "phase1");
    write_text_file((out_dir / "config.json").string(),
                    serialize_experiment_config(config));
  }

  const std::string phase1_fp = fingerprint_of(phase1_config_json(config));

  // ---- Phase 1: one old model per seed (trained once, reused by arms). ----
  struct Phase1Out {
    ParamSet params;
    LearningSpeedTable table;
  };
  std::vector<Phase1Out> phase1(config.seeds.size());

  parallel_for(config.seeds.size(), options.workers, [&](std::size_t si) {
    const std::uint64_t seed = config.seeds[si];
    const fs::path snap_path =
        out_dir / "phase1" / ("phase1_seed" + std::to_string(seed) + ".json");

    if (options.persist && fs::exists(snap_path)) {
      // Reuse the sunk cost when the phase-1 config matches.
      try {
        Phase1Snapshot snap = parse_phase1(read_text_file(snap_path.string()));
        if (snap.fingerprint == phase1_fp && snap.seed == seed) {
          phase1[si] = {std::move(snap.params), std::move(snap.learning_speed)};
          return;
        }
      } catch (const std::exception&) {
        // Fall through to retraining on any parse problem.
      }
    }

    const ScenarioData data = build_scenario(config.scenario, seed);
    const TrainSpec spec = phase1_train_spec(config, seed, data.old_train.size());
    TrainResult result = train(spec, data.old_train, data.combined_test, nullptr,
                               task_seed(seed, 0, "train"));
    if (result.record.aborted) {
      throw std::runtime_error("phase 1 aborted for seed " + std::to_string(seed) + ": " +
                               result.record.abort_reason);
    }
    phase1[si] = {std::move(result.params), std::move(result.learning_speed)};

    if (options.persist) {
      Phase1Snapshot snap;
      snap.fingerprint = phase1_fp;
      snap.seed = seed;
      snap.params = phase1[si].params;
      snap.learning_speed = phase1[si].table;
      write_text_file(snap_path.string(), serialize_phase1(snap));
    }
  });

  // ---- Phase 2: every arm from its initialization. ----
  const std::size_t n_arms = config.arms.size();
  const std::size_t n_seeds = config.seeds.size();
  std::vector<RunRecord> records(n_arms * n_seeds);

  parallel_for(n_arms * n_seeds, options.workers, [&](std::size_t job) {
    const std::size_t ai = job / n_seeds;
    const std::size_t si = job % n_seeds;
    const ArmSpec& arm = config.arms[ai];
    const std::uint64_t seed = config.seeds[si];

    const ScenarioData data = build_scenario(config.scenario, seed);
    const TrainSpec spec =
        arm_train_spec(config, arm, seed, data.merged_train.size(), phase1[si].table);

    const bool warm = (arm.init.mode != InitMode::scratch) && !arm.init.scratch_base;
    TrainResult result = train(spec, data.merged_train, data.combined_test,
                               warm ? &phase1[si].params : nullptr,
                               task_seed(seed, 1, "train"));

    RunRecord& rec = result.record;
    rec.arm = arm.name;
    rec.seed = seed;
    rec.config_json = arm_config_json(config, arm);
    rec.fingerprint = fingerprint_of(rec.config_json);
    rec.phase1_fingerprint = warm ? param_hash(phase1[si].params) : "";
    records[job] = std::move(rec);
  });

  ScenarioResult out;
  for (std::size_t job = 0; job < records.size(); ++job) {
    out.records_by_arm[records[job].arm].push_back(records[job]);
  }

  if (options.persist) {
    for (const auto& [arm, recs] : out.records_by_arm) {
      for (const RunRecord& rec : recs) {
        const std::string base = arm + "__seed" + std::to_string(rec.seed);
        write_text_file((out_dir / "records" / (base + ".json")).string(),
                        serialize_run_record(rec));
        write_text_file((out_dir / "records" / (base + ".csv")).string(),
                        run_record_csv(rec));
      }
    }
  }

  // Aborted runs stay on disk as diagnostics but are excluded from metrics.
  std::map<std::string, std::vector<RunRecord>> usable;
  for (const auto& [arm, recs] : out.records_by_arm) {
    std::vector<RunRecord> ok;
    for (const RunRecord& r : recs) {
      if (!r.aborted) ok.push_back(r);
    }
    if (!ok.empty()) usable[arm] = std::move(ok);
  }
  if (usable.count(config.scratch_arm) == 0) {
    throw std::runtime_error("run_scenario: scratch arm '" + config.scratch_arm +
                             "' has no usable records");
  }
  out.report = aggregate(usable, config.scratch_arm, config.r_list, config.target_mode);

  if (options.persist) {
    write_report_files(out.report, config.out_dir, {});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sequences
// ---------------------------------------------------------------------------

void SequenceConfig::validate() const {
  gen.validate();
  method_arm.validate();
  if (base_classes == 0) throw std::invalid_argument("SequenceConfig: base_classes == 0");
  if (increments.empty()) throw std::invalid_argument("SequenceConfig: no increments");
  std::size_t total = base_classes;
  for (std::size_t inc : increments) {
    if (inc == 0) throw std::invalid_argument("SequenceConfig: zero increment");
    total += inc;
  }
  if (total > gen.classes) {
    throw std::invalid_argument("SequenceConfig: base + increments exceed class count");
  }
  if (hidden_widths.empty()) throw std::invalid_argument("SequenceConfig: no hidden widths");
  if (seeds.empty()) throw std::invalid_argument("SequenceConfig: no seeds");
  if (task_iterations < 1) throw std::invalid_argument("SequenceConfig: task_iterations < 1");
  if (batch_size == 0) throw std::invalid_argument("SequenceConfig: batch_size == 0");
}

SequenceConfig desk_sequence_config() {
  SequenceConfig c;
  c.gen.classes = 10;
  c.gen.dim = 32;
  c.gen.train_per_class = 500;
  c.gen.test_per_class = 100;
  c.gen.spread = 2.0;
  c.scenario_seed = 1902;
  c.base_classes = 5;
  c.increments = {1, 1, 1, 1, 1};
  c.hidden_widths = {64};

  // Per-task schedulers run at full length: the warm start carries the speed
  // advantage, while compression can cap a task's final accuracy a hair below
  // its scratch reference.
  ArmSpec method;
  method.name = "continuous";
  method.init.mode = InitMode::shrink_perturb;
  method.reg_mode = RegMode::l2_init;
  method.lambda = 0.01;
  method.sampler_mode = SamplerMode::easy_hard;
  method.affected_fraction = 0.2;
  method.relative_weight = 0.1;
  method.schedule_multiplier = 1.0;
  c.method_arm = method;

  c.task_iterations = 1200;
  c.out_dir = "out_sequence";
  return c;
}

SequenceResult run_sequence(const SequenceConfig& config, const RunOptions& options) {
  config.validate();

  const fs::path out_dir(config.out_dir);
  if (options.persist) {
    fs::create_directories(out_dir / "records");
    write_text_file((out_dir / "config.json").string(), serialize_sequence_config(config));
  }

  NetworkSpec net;
  net.layer_widths.push_back(config.gen.dim);
  for (std::size_t w : config.hidden_widths) net.layer_widths.push_back(w);
  net.layer_widths.push_back(config.gen.classes);

  std::vector<std::size_t> splits;
  splits.push_back(config.base_classes);
  for (std::size_t inc : config.increments) splits.push_back(inc);
  const std::size_t leftover =
      config.gen.classes - std::accumulate(splits.begin(), splits.end(), std::size_t{0});
  if (leftover > 0) splits.push_back(leftover);  // never-seen classes, test-only

  const std::size_t n_tasks = config.increments.size();
  SequenceResult out;
  out.per_seed.resize(config.seeds.size());
  std::mutex records_mutex;

  parallel_for(config.seeds.size(), options.workers, [&](std::size_t si) {
    const std::uint64_t seed = config.seeds[si];
    const std::uint64_t data_seed = derive_seed(config.scenario_seed, seed);
    auto [train_all, test_all] = gen_gaussian_classes(config.gen, data_seed);
    auto groups = split_by_class(train_all, test_all, splits,
                                 derive_seed(data_seed, "split"));

    // Evaluation always uses the full test set, unseen classes included;
    // data availability caps the reachable accuracy.
    Dataset full_test;
    full_test.class_count = config.gen.classes;
    full_test.role = Role::test;
    for (auto& [tr, te] : groups) full_test = merge(full_test, te);

    auto make_spec = [&](std::size_t task, const ArmSpec& arm, std::size_t train_size,
                         const LearningSpeedTable& table, bool record_ls) {
      TrainSpec t;
      t.net = net;
      t.init = arm.init;
      t.init.random_seed = task_seed(seed, task, "init");
      t.reg_mode = arm.reg_mode;
      t.lambda = arm.lambda;
      t.sampler.mode = arm.sampler_mode;
      t.sampler.affected_fraction = arm.affected_fraction;
      t.sampler.relative_weight = arm.relative_weight;
      if (arm.sampler_mode == SamplerMode::easy_hard) t.sampler.learning_speed = table;
      SchedulerSpec sched;
      sched.family = config.schedule_family;
      sched.lr_max = config.lr_max;
      sched.lr_min = config.lr_min;
      sched.horizon = config.task_iterations;
      sched.multiplier = arm.schedule_multiplier;
      t.schedule = sched;
      t.optimizer = config.optimizer;
      t.iterations = config.task_iterations;
      t.eval_every = config.eval_every > 0
                         ? config.eval_every
                         : iterations_per_epoch(train_size, config.batch_size);
      t.batch_size = config.batch_size;
      t.record_learning_speed = record_ls;
      return t;
    };

    auto store_record = [&](RunRecord rec, const std::string& arm_name) {
      rec.arm = arm_name;
      rec.seed = seed;
      rec.fingerprint = fingerprint_of(serialize_sequence_config(config) + "|" + arm_name);
      if (options.persist) {
        const std::string base = arm_name + "__seed" + std::to_string(seed);
        write_text_file((out_dir / "records" / (base + ".json")).string(),
                        serialize_run_record(rec));
      }
      std::lock_guard<std::mutex> lock(records_mutex);
      out.records_by_arm[arm_name].push_back(std::move(rec));
    };

    // Task 0: the base (old) model, a sunk cost.
    ArmSpec base_arm;
    base_arm.name = "task0";
    base_arm.init.mode = InitMode::scratch;
    Dataset seen_train = groups[0].first;
    TrainResult prev = train(make_spec(0, base_arm, seen_train.size(), {}, true),
                             seen_train, full_test, nullptr, task_seed(seed, 0, "train"));
    if (prev.record.aborted) {
      throw std::runtime_error("sequence task 0 aborted: " + prev.record.abort_reason);
    }
    store_record(prev.record, "task0");

    SequenceSeedResult& seed_result = out.per_seed[si];
    seed_result.seed = seed;
    std::int64_t cum_cont = 0, cum_scratch = 0;
    bool cont_defined = true, scratch_defined = true;
    std::size_t classes_seen = config.base_classes;

    for (std::size_t k = 1; k <= n_tasks; ++k) {
      classes_seen += config.increments[k - 1];
      // Everything before this task is old, the increment is new.
      Dataset old_part = with_origin(seen_train, Origin::old_data);
      Dataset new_part = with_origin(groups[k].first, Origin::new_data);
      Dataset merged = merge(old_part, new_part);

      ArmSpec cont_arm = config.method_arm;
      TrainResult cont =
          train(make_spec(k, cont_arm, merged.size(), prev.learning_speed, true), merged,
                full_test, &prev.params, task_seed(seed, k, "train"));

      ArmSpec scratch_arm;
      scratch_arm.name = "scratch";
      scratch_arm.init.mode = InitMode::scratch;
      TrainResult scratch =
          train(make_spec(k, scratch_arm, merged.size(), {}, false), merged, full_test,
                nullptr, task_seed(seed, k, "train"));

      const std::string task_tag = "task" + std::to_string(k);
      store_record(cont.record, task_tag + "_continuous");
      store_record(scratch.record, task_tag + "_scratch");

      const LearningCurve cont_curve = curve_of(cont.record);
      const LearningCurve scratch_curve = curve_of(scratch.record);
      const double a_scratch = config.target_mode == TargetMode::final_acc
                                   ? scratch_curve.final_acc()
                                   : scratch_curve.max_acc();

      TaskLedgerEntry entry;
      entry.task_index = k;
      entry.classes_seen = classes_seen;
      entry.max_possible_accuracy =
          static_cast<double>(classes_seen) / static_cast<double>(config.gen.classes);
      entry.a_scratch = a_scratch;
      entry.continuous_iterations = speed(cont_curve, a_scratch);
      entry.scratch_iterations = speed(scratch_curve, a_scratch);
      if (entry.continuous_iterations) {
        cum_cont += *entry.continuous_iterations;
      } else {
        cont_defined = false;
      }
      if (entry.scratch_iterations) {
        cum_scratch += *entry.scratch_iterations;
      } else {
        scratch_defined = false;
      }
      seed_result.tasks.push_back(entry);

      seen_train = merge(old_part, new_part);
      prev = std::move(cont);
    }

    if (cont_defined) seed_result.cumulative_continuous = cum_cont;
    if (scratch_defined) seed_result.cumulative_scratch = cum_scratch;
  });

  for (auto& [arm, recs] : out.records_by_arm) {
    std::sort(recs.begin(), recs.end(),
              [](const RunRecord& a, const RunRecord& b) { return a.seed < b.seed; });
  }

  if (options.persist) {
    write_sequence_ledger(out, config.out_dir);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

void SweepConfig::validate() const {
  base.validate();
  if (grid.empty()) throw std::invalid_argument("SweepConfig: empty grid");
  bool found = false;
  for (const ArmSpec& arm : base.arms) found = found || arm.name == base_arm;
  if (!found) {
    throw std::invalid_argument("SweepConfig: base arm '" + base_arm + "' not among arms");
  }
  // Every grid value must be legal for the parameter before anything runs.
  const ArmSpec& target = *std::find_if(base.arms.begin(), base.arms.end(),
                                        [this](const ArmSpec& a) { return a.name == base_arm; });
  for (double v : grid) apply_sweep_parameter(target, parameter, v);
}

ArmSpec apply_sweep_parameter(const ArmSpec& arm, const std::string& parameter, double value) {
  ArmSpec out = arm;
  if (parameter == "alpha") {
    out.init.alpha = value;
  } else if (parameter == "beta") {
    out.init.beta = value;
  } else if (parameter == "lambda") {
    out.lambda = value;
  } else if (parameter == "c") {
    out.affected_fraction = value;
  } else if (parameter == "r") {
    out.relative_weight = value;
  } else if (parameter == "multiplier") {
    out.schedule_multiplier = value;
  } else {
    throw std::invalid_argument("unknown sweep parameter: " + parameter);
  }
  out.validate();
  return out;
}

SweepResult run_sweep(const SweepConfig& config, const RunOptions& options) {
  config.validate();

  SweepResult out;
  out.grid = config.grid;
  for (double value : config.grid) {
    ExperimentConfig cell = config.base;
    for (ArmSpec& arm : cell.arms) {
      if (arm.name == config.base_arm) {
        arm = apply_sweep_parameter(arm, config.parameter, value);
      }
    }
    cell.out_dir = config.base.out_dir + "/" + config.parameter + "_" + fmt_value(value);
    out.per_value.push_back(run_scenario(cell, options));
  }

  if (options.persist) {
    write_sweep_summary(config, out, config.base.out_dir);
  }
  return out;
}

}  // namespace contrain
