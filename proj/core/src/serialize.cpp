#include "contrain/serialize.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace contrain {

using nlohmann::json;

namespace {

void require_schema(const json& j, const std::string& kind) {
  if (!j.is_object()) throw std::runtime_error("config: not a JSON object");
  if (j.value("schema_version", -1) != kSchemaVersion) {
    throw std::runtime_error("config: unsupported schema_version");
  }
  if (j.value("kind", "") != kind) {
    throw std::runtime_error("config: expected kind '" + kind + "', got '" +
                             j.value("kind", "") + "'");
  }
}

json tensor_to_json(const Tensor& t) {
  return json{{"shape", t.shape}, {"data", t.data}};
}

Tensor tensor_from_json(const json& j) {
  return Tensor(j.at("shape").get<std::vector<std::size_t>>(),
                j.at("data").get<std::vector<double>>());
}

json params_to_json(const ParamSet& p) {
  json arr = json::array();
  for (const auto& e : p.entries) {
    arr.push_back(json{{"name", e.name}, {"tensor", tensor_to_json(e.value)}});
  }
  return arr;
}

ParamSet params_from_json(const json& j) {
  ParamSet p;
  for (const auto& e : j) {
    p.entries.push_back({e.at("name").get<std::string>(), tensor_from_json(e.at("tensor"))});
  }
  return p;
}

json ls_to_json(const LearningSpeedTable& t) {
  json ids = json::array();
  json ls = json::array();
  for (const auto& [id, v] : t.ls) {
    ids.push_back(id);
    ls.push_back(v);
  }
  return json{{"ids", ids}, {"ls", ls}};
}

LearningSpeedTable ls_from_json(const json& j) {
  LearningSpeedTable t;
  const auto ids = j.at("ids").get<std::vector<std::int64_t>>();
  const auto ls = j.at("ls").get<std::vector<double>>();
  if (ids.size() != ls.size()) throw std::runtime_error("learning speed: misaligned arrays");
  for (std::size_t i = 0; i < ids.size(); ++i) t.ls[ids[i]] = ls[i];
  return t;
}

json init_to_json(const InitSpec& s) {
  json j{{"mode", init_mode_name(s.mode)},
         {"alpha", s.alpha},
         {"beta", s.beta}};
  if (s.scratch_base) j["scratch_base"] = true;
  return j;
}

InitSpec init_from_json(const json& j) {
  InitSpec s;
  s.mode = init_mode_from_name(j.value("mode", "scratch"));
  s.alpha = j.value("alpha", 0.4);
  s.beta = j.value("beta", 0.001);
  s.scratch_base = j.value("scratch_base", false);
  s.validate();
  return s;
}

std::string reg_mode_name(RegMode m) {
  switch (m) {
    case RegMode::none: return "none";
    case RegMode::l2: return "l2";
    case RegMode::l2_init: return "l2_init";
    case RegMode::reg_only: return "reg_only";
  }
  return "none";
}

RegMode reg_mode_from_name(const std::string& s) {
  if (s == "none") return RegMode::none;
  if (s == "l2") return RegMode::l2;
  if (s == "l2_init") return RegMode::l2_init;
  if (s == "reg_only") return RegMode::reg_only;
  throw std::runtime_error("unknown reg mode: " + s);
}

json arm_to_json(const ArmSpec& a) {
  return json{{"name", a.name},
              {"init", init_to_json(a.init)},
              {"objective", json{{"mode", reg_mode_name(a.reg_mode)}, {"lambda", a.lambda}}},
              {"sampler", json{{"mode", sampler_mode_name(a.sampler_mode)},
                               {"c", a.affected_fraction},
                               {"r", a.relative_weight}}},
              {"schedule_multiplier", a.schedule_multiplier}};
}

ArmSpec arm_from_json(const json& j) {
  ArmSpec a;
  a.name = j.at("name").get<std::string>();
  a.init = init_from_json(j.value("init", json::object()));
  if (j.contains("objective")) {
    a.reg_mode = reg_mode_from_name(j["objective"].value("mode", "none"));
    a.lambda = j["objective"].value("lambda", 0.0);
  }
  if (j.contains("sampler")) {
    a.sampler_mode = sampler_mode_from_name(j["sampler"].value("mode", "proportional"));
    a.affected_fraction = j["sampler"].value("c", 0.0);
    a.relative_weight = j["sampler"].value("r", 1.0);
  }
  a.schedule_multiplier = j.value("schedule_multiplier", 1.0);
  a.validate();
  return a;
}

json gen_to_json(const GaussianParams& g) {
  return json{{"classes", g.classes},
              {"dim", g.dim},
              {"train_per_class", g.train_per_class},
              {"test_per_class", g.test_per_class},
              {"mean_scale", g.mean_scale},
              {"spread", g.spread}};
}

GaussianParams gen_from_json(const json& j) {
  GaussianParams g;
  g.classes = j.value("classes", g.classes);
  g.dim = j.value("dim", g.dim);
  g.train_per_class = j.value("train_per_class", g.train_per_class);
  g.test_per_class = j.value("test_per_class", g.test_per_class);
  g.mean_scale = j.value("mean_scale", g.mean_scale);
  g.spread = j.value("spread", g.spread);
  g.validate();
  return g;
}

json scenario_to_json(const ScenarioSpec& s) {
  json j{{"kind", s.kind == ScenarioKind::class_incremental ? "class_incremental"
                                                            : "domain_shift"},
         {"generator", gen_to_json(s.gen)},
         {"seed", s.seed}};
  if (s.kind == ScenarioKind::class_incremental) {
    j["splits"] = s.splits;
  } else {
    j["shift"] = json{{"rotation_angle", s.shift.rotation_angle},
                      {"translation_scale", s.shift.translation_scale},
                      {"noise_std", s.shift.noise_std}};
  }
  return j;
}

ScenarioSpec scenario_from_json(const json& j) {
  ScenarioSpec s;
  const std::string kind = j.value("kind", "class_incremental");
  if (kind == "class_incremental") {
    s.kind = ScenarioKind::class_incremental;
  } else if (kind == "domain_shift") {
    s.kind = ScenarioKind::domain_shift;
  } else {
    throw std::runtime_error("unknown scenario kind: " + kind);
  }
  if (j.contains("generator")) s.gen = gen_from_json(j["generator"]);
  if (j.contains("splits")) s.splits = j["splits"].get<std::vector<std::size_t>>();
  if (j.contains("shift")) {
    s.shift.rotation_angle = j["shift"].value("rotation_angle", 0.0);
    s.shift.translation_scale = j["shift"].value("translation_scale", 0.0);
    s.shift.noise_std = j["shift"].value("noise_std", 0.0);
  }
  s.seed = j.value("seed", std::uint64_t{0});
  s.validate();
  return s;
}

json experiment_to_json(const ExperimentConfig& c) {
  json arms = json::array();
  for (const auto& a : c.arms) arms.push_back(arm_to_json(a));
  return json{{"schema_version", kSchemaVersion},
              {"kind", "experiment"},
              {"scenario", scenario_to_json(c.scenario)},
              {"hidden_widths", c.hidden_widths},
              {"arms", arms},
              {"seeds", c.seeds},
              {"iterations", c.iterations},
              {"phase1_iterations", c.phase1_iterations},
              {"eval_every", c.eval_every},
              {"batch_size", c.batch_size},
              {"optimizer", optimizer_name(c.optimizer)},
              {"lr_max", c.lr_max},
              {"lr_min", c.lr_min},
              {"schedule", schedule_family_name(c.schedule_family)},
              {"milestones", c.milestones},
              {"gamma", c.gamma},
              {"r_list", c.r_list},
              {"target_mode", target_mode_name(c.target_mode)},
              {"scratch_arm", c.scratch_arm},
              {"easy_hard_warmup_epochs", c.easy_hard_warmup_epochs},
              {"out_dir", c.out_dir}};
}

ExperimentConfig experiment_from_json(const json& j) {
  ExperimentConfig c;
  c.scenario = scenario_from_json(j.at("scenario"));
  if (j.contains("hidden_widths")) {
    c.hidden_widths = j["hidden_widths"].get<std::vector<std::size_t>>();
  }
  c.arms.clear();
  if (j.contains("arms") && j["arms"].is_string()) {
    const std::string preset = j["arms"].get<std::string>();
    if (preset == "ablation_grid") {
      c.arms = ablation_grid_arms();
    } else if (preset == "standard") {
      c.arms = standard_arms();
    } else {
      throw std::runtime_error("unknown arms preset: " + preset);
    }
  } else if (j.contains("arms")) {
    for (const auto& a : j["arms"]) c.arms.push_back(arm_from_json(a));
  } else {
    c.arms = standard_arms();
  }
  if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  c.iterations = j.value("iterations", c.iterations);
  c.phase1_iterations = j.value("phase1_iterations", c.phase1_iterations);
  c.eval_every = j.value("eval_every", c.eval_every);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.optimizer = optimizer_from_name(j.value("optimizer", "adam"));
  c.lr_max = j.value("lr_max", c.lr_max);
  c.lr_min = j.value("lr_min", c.lr_min);
  c.schedule_family = schedule_family_from_name(j.value("schedule", "cosine"));
  if (j.contains("milestones")) {
    c.milestones = j["milestones"].get<std::vector<std::int64_t>>();
  }
  c.gamma = j.value("gamma", c.gamma);
  if (j.contains("r_list")) c.r_list = j["r_list"].get<std::vector<int>>();
  c.target_mode = target_mode_from_name(j.value("target_mode", "final"));
  c.scratch_arm = j.value("scratch_arm", c.scratch_arm);
  c.easy_hard_warmup_epochs = j.value("easy_hard_warmup_epochs", c.easy_hard_warmup_epochs);
  c.out_dir = j.value("out_dir", c.out_dir);
  c.validate();
  return c;
}

}  // namespace

std::string serialize_run_record(const RunRecord& r) {
  json j{{"schema_version", kSchemaVersion},
         {"kind", "run_record"},
         {"arm", r.arm},
         {"fingerprint", r.fingerprint},
         {"phase1_fingerprint", r.phase1_fingerprint},
         {"seed", r.seed},
         {"config", r.config_json.empty() ? json::object() : json::parse(r.config_json)},
         {"eval_iterations", r.eval_iters},
         {"test_accuracy", r.test_accuracy},
         {"grad_norm_old", r.grad_norm_old},
         {"grad_norm_new", r.grad_norm_new},
         {"train_loss", r.train_loss},
         {"total_iterations", r.total_iterations},
         {"aborted", r.aborted},
         {"abort_reason", r.abort_reason}};
  return j.dump(2);
}

RunRecord parse_run_record(const std::string& text) {
  const json j = json::parse(text);
  require_schema(j, "run_record");
  RunRecord r;
  r.arm = j.value("arm", "");
  r.fingerprint = j.value("fingerprint", "");
  r.phase1_fingerprint = j.value("phase1_fingerprint", "");
  r.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("config") && !j["config"].empty()) r.config_json = j["config"].dump();
  r.eval_iters = j.at("eval_iterations").get<std::vector<std::int64_t>>();
  r.test_accuracy = j.at("test_accuracy").get<std::vector<double>>();
  r.grad_norm_old = j.value("grad_norm_old", std::vector<double>{});
  r.grad_norm_new = j.value("grad_norm_new", std::vector<double>{});
  r.train_loss = j.value("train_loss", std::vector<double>{});
  r.total_iterations = j.value("total_iterations", std::int64_t{0});
  r.aborted = j.value("aborted", false);
  r.abort_reason = j.value("abort_reason", "");
  if (r.eval_iters.size() != r.test_accuracy.size()) {
    throw std::runtime_error("run record: misaligned curves");
  }
  return r;
}

std::string run_record_csv(const RunRecord& r) {
  std::ostringstream os;
  os.precision(17);
  os << "iteration,test_accuracy,train_loss,grad_norm_old,grad_norm_new\n";
  std::size_t eval_pos = 0;
  const std::int64_t last = std::max<std::int64_t>(
      r.train_loss.empty() ? 0 : static_cast<std::int64_t>(r.train_loss.size()),
      r.eval_iters.empty() ? 0 : r.eval_iters.back());
  for (std::int64_t t = 0; t <= last; ++t) {
    const bool is_eval = eval_pos < r.eval_iters.size() && r.eval_iters[eval_pos] == t;
    const bool has_loss = t >= 1 && static_cast<std::size_t>(t - 1) < r.train_loss.size();
    if (!is_eval && !has_loss) continue;
    os << t << ",";
    if (is_eval) os << r.test_accuracy[eval_pos];
    os << ",";
    if (has_loss) os << r.train_loss[static_cast<std::size_t>(t - 1)];
    os << ",";
    if (is_eval && eval_pos < r.grad_norm_old.size()) os << r.grad_norm_old[eval_pos];
    os << ",";
    if (is_eval && eval_pos < r.grad_norm_new.size()) os << r.grad_norm_new[eval_pos];
    os << "\n";
    if (is_eval) ++eval_pos;
  }
  return os.str();
}

std::string serialize_phase1(const Phase1Snapshot& s) {
  json j{{"schema_version", kSchemaVersion},
         {"kind", "phase1_snapshot"},
         {"fingerprint", s.fingerprint},
         {"seed", s.seed},
         {"params", params_to_json(s.params)},
         {"learning_speed", ls_to_json(s.learning_speed)}};
  return j.dump(2);
}

Phase1Snapshot parse_phase1(const std::string& text) {
  const json j = json::parse(text);
  require_schema(j, "phase1_snapshot");
  Phase1Snapshot s;
  s.fingerprint = j.value("fingerprint", "");
  s.seed = j.value("seed", std::uint64_t{0});
  s.params = params_from_json(j.at("params"));
  s.learning_speed = ls_from_json(j.at("learning_speed"));
  return s;
}

std::string serialize_experiment_config(const ExperimentConfig& c) {
  return experiment_to_json(c).dump(2);
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  const json j = json::parse(text);
  require_schema(j, "experiment");
  return experiment_from_json(j);
}

std::string serialize_sequence_config(const SequenceConfig& c) {
  return json{{"schema_version", kSchemaVersion},
              {"kind", "sequence"},
              {"generator", gen_to_json(c.gen)},
              {"scenario_seed", c.scenario_seed},
              {"base_classes", c.base_classes},
              {"increments", c.increments},
              {"method_arm", arm_to_json(c.method_arm)},
              {"hidden_widths", c.hidden_widths},
              {"seeds", c.seeds},
              {"task_iterations", c.task_iterations},
              {"eval_every", c.eval_every},
              {"batch_size", c.batch_size},
              {"optimizer", optimizer_name(c.optimizer)},
              {"lr_max", c.lr_max},
              {"lr_min", c.lr_min},
              {"schedule", schedule_family_name(c.schedule_family)},
              {"target_mode", target_mode_name(c.target_mode)},
              {"out_dir", c.out_dir}}
      .dump(2);
}

SequenceConfig parse_sequence_config(const std::string& text) {
  const json j = json::parse(text);
  require_schema(j, "sequence");
  SequenceConfig c;
  if (j.contains("generator")) c.gen = gen_from_json(j["generator"]);
  c.scenario_seed = j.value("scenario_seed", std::uint64_t{0});
  c.base_classes = j.value("base_classes", c.base_classes);
  if (j.contains("increments")) {
    c.increments = j["increments"].get<std::vector<std::size_t>>();
  }
  if (j.contains("method_arm")) c.method_arm = arm_from_json(j["method_arm"]);
  if (j.contains("hidden_widths")) {
    c.hidden_widths = j["hidden_widths"].get<std::vector<std::size_t>>();
  }
  if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  c.task_iterations = j.value("task_iterations", c.task_iterations);
  c.eval_every = j.value("eval_every", c.eval_every);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.optimizer = optimizer_from_name(j.value("optimizer", "adam"));
  c.lr_max = j.value("lr_max", c.lr_max);
  c.lr_min = j.value("lr_min", c.lr_min);
  c.schedule_family = schedule_family_from_name(j.value("schedule", "cosine"));
  c.target_mode = target_mode_from_name(j.value("target_mode", "final"));
  c.out_dir = j.value("out_dir", c.out_dir);
  c.validate();
  return c;
}

std::string serialize_sweep_config(const SweepConfig& c) {
  json j = json::parse(serialize_experiment_config(c.base));
  return json{{"schema_version", kSchemaVersion},
              {"kind", "sweep"},
              {"parameter", c.parameter},
              {"grid", c.grid},
              {"base_arm", c.base_arm},
              {"experiment", j}}
      .dump(2);
}

SweepConfig parse_sweep_config(const std::string& text) {
  const json j = json::parse(text);
  require_schema(j, "sweep");
  SweepConfig c;
  c.parameter = j.at("parameter").get<std::string>();
  c.grid = j.at("grid").get<std::vector<double>>();
  c.base_arm = j.at("base_arm").get<std::string>();
  json exp = j.at("experiment");
  if (!exp.contains("schema_version")) exp["schema_version"] = kSchemaVersion;
  if (!exp.contains("kind")) exp["kind"] = "experiment";
  c.base = parse_experiment_config(exp.dump());
  c.validate();
  return c;
}

std::string config_kind(const std::string& text) {
  const json j = json::parse(text);
  if (!j.is_object() || !j.contains("kind")) {
    throw std::runtime_error("config: missing 'kind' field");
  }
  return j["kind"].get<std::string>();
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace contrain
