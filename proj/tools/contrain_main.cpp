// Command-line front end: run / sequence / sweep / report.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "contrain/experiment.hpp"
#include "contrain/report.hpp"
#include "contrain/serialize.hpp"

namespace {

using contrain::RunOptions;

// One machine-readable line on stderr, nonzero exit.
int fail(const std::string& code, const std::string& message) {
  const nlohmann::json err{{"error", code}, {"message", message}};
  std::cerr << err.dump() << "\n";
  return 1;
}

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::vector<std::uint64_t> seeds;
  std::size_t workers = 1;
  std::string target_mode;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool needs_config = true) {
  if (needs_config) {
    cmd->add_option("--config", flags.config_path, "JSON config path")->required();
  }
  cmd->add_option("--seeds", flags.seeds, "Override the config's seed list")
      ->delimiter(',');
  cmd->add_option("--out", flags.out_dir, "Override the output directory");
  cmd->add_option("--workers", flags.workers, "Parallel (arm, seed) runs");
  cmd->add_option("--target-mode", flags.target_mode,
                  "a_scratch definition: final|max")
      ->check(CLI::IsMember({"final", "max"}));
}

void print_report(const contrain::SpeedReport& report) {
  std::cout << contrain::report_markdown(report);
}

int cmd_run(const CommonFlags& flags) {
  auto config = contrain::parse_experiment_config(contrain::read_text_file(flags.config_path));
  if (!flags.seeds.empty()) config.seeds = flags.seeds;
  if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
  if (!flags.target_mode.empty()) {
    config.target_mode = contrain::target_mode_from_name(flags.target_mode);
  }
  config.validate();

  RunOptions options;
  options.workers = flags.workers;
  const auto result = contrain::run_scenario(config, options);
  print_report(result.report);
  std::cout << "records: " << config.out_dir << "/records\n";
  return 0;
}

int cmd_sequence(const CommonFlags& flags) {
  auto config = contrain::parse_sequence_config(contrain::read_text_file(flags.config_path));
  if (!flags.seeds.empty()) config.seeds = flags.seeds;
  if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
  if (!flags.target_mode.empty()) {
    config.target_mode = contrain::target_mode_from_name(flags.target_mode);
  }
  config.validate();

  RunOptions options;
  options.workers = flags.workers;
  const auto result = contrain::run_sequence(config, options);

  std::cout << "| Seed | Cumulative continuous | Cumulative scratch |\n|---|---|---|\n";
  for (const auto& seed : result.per_seed) {
    std::cout << "| " << seed.seed << " | "
              << (seed.cumulative_continuous ? std::to_string(*seed.cumulative_continuous)
                                             : "/")
              << " | "
              << (seed.cumulative_scratch ? std::to_string(*seed.cumulative_scratch) : "/")
              << " |\n";
  }
  std::cout << "ledger: " << config.out_dir << "/sequence_ledger.json\n";
  return 0;
}

int cmd_sweep(const CommonFlags& flags) {
  auto config = contrain::parse_sweep_config(contrain::read_text_file(flags.config_path));
  if (!flags.seeds.empty()) config.base.seeds = flags.seeds;
  if (!flags.out_dir.empty()) config.base.out_dir = flags.out_dir;
  if (!flags.target_mode.empty()) {
    config.base.target_mode = contrain::target_mode_from_name(flags.target_mode);
  }
  config.validate();

  RunOptions options;
  options.workers = flags.workers;
  const auto result = contrain::run_sweep(config, options);
  std::cout << "sweep cells: " << result.grid.size() << "\n";
  std::cout << "summary: " << config.base.out_dir << "/sweep_summary.md\n";
  return 0;
}

int cmd_report(const std::string& records_dir, const std::string& out_dir,
               const contrain::DirReportOptions& options) {
  std::vector<std::string> warnings;
  const auto report = contrain::report_from_dir(records_dir, options, warnings);
  contrain::write_report_files(report, out_dir, warnings);
  print_report(report);
  for (const std::string& w : warnings) std::cout << "warning: " << w << "\n";
  std::cout << "artifacts: " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contrain: continuous-training toolkit"};
  app.require_subcommand(1);

  CommonFlags run_flags, seq_flags, sweep_flags;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario from a JSON config");
  add_common(run_cmd, run_flags);

  auto* seq_cmd = app.add_subcommand("sequence", "Run a multi-task sequence");
  add_common(seq_cmd, seq_flags);

  auto* sweep_cmd = app.add_subcommand("sweep", "Run a single-parameter sweep");
  add_common(sweep_cmd, sweep_flags);

  std::string records_dir, report_out = "report_out";
  contrain::DirReportOptions report_options;
  std::string report_target_mode;
  auto* report_cmd = app.add_subcommand("report", "Render artifacts from a records dir");
  report_cmd->add_option("--records", records_dir, "Directory of RunRecord JSON files")
      ->required();
  report_cmd->add_option("--out", report_out, "Artifacts directory");
  report_cmd->add_option("--scratch-arm", report_options.scratch_arm,
                         "Baseline arm name (default: scratch)");
  report_cmd->add_option("--r-list", report_options.r_list, "Speed-up percentages")
      ->delimiter(',');
  report_cmd->add_option("--target-mode", report_target_mode,
                         "a_scratch definition: final|max")
      ->check(CLI::IsMember({"final", "max"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return fail("cli_parse", e.what());
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_flags);
    if (seq_cmd->parsed()) return cmd_sequence(seq_flags);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_flags);
    if (report_cmd->parsed()) {
      if (!report_target_mode.empty()) {
        report_options.target_mode = contrain::target_mode_from_name(report_target_mode);
      }
      return cmd_report(records_dir, report_out, report_options);
    }
  } catch (const std::exception& ex) {
    return fail("runtime", ex.what());
  }
  return fail("cli", "no subcommand");
}
