#include "contrain/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "contrain/serialize.hpp"

namespace contrain {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v, const char* spec = "%.2f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

}  // namespace

std::string render_curves_svg(const SpeedReport& report) {
  const double width = 900, height = 560;
  const double left = 70, right = width - 230, top = 30, bottom = height - 50;

  std::int64_t max_iter = 1;
  for (const ArmSummary& arm : report.arms) {
    max_iter = std::max(max_iter, arm.mean_curve.iters.back());
  }

  auto x_of = [&](double it) { return left + (right - left) * it / static_cast<double>(max_iter); };
  auto y_of = [&](double acc) { return bottom - (bottom - top) * acc; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  os << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";

  // Axes and grid.
  for (int i = 0; i <= 5; ++i) {
    const double acc = i / 5.0;
    const double y = y_of(acc);
    os << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(right)
       << "\" y2=\"" << fmt(y) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << fmt(left - 10) << "\" y=\"" << fmt(y + 4)
       << "\" font-size=\"12\" text-anchor=\"end\" font-family=\"sans-serif\">"
       << fmt(acc, "%.1f") << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double it = max_iter * i / 4.0;
    const double x = x_of(it);
    os << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(bottom) << "\" x2=\"" << fmt(x)
       << "\" y2=\"" << fmt(bottom + 5) << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(bottom + 20)
       << "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">"
       << static_cast<std::int64_t>(it) << "</text>\n";
  }
  os << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(left)
     << "\" y2=\"" << fmt(bottom) << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  os << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(bottom) << "\" x2=\"" << fmt(right)
     << "\" y2=\"" << fmt(bottom) << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  os << "<text x=\"" << fmt((left + right) / 2) << "\" y=\"" << fmt(height - 12)
     << "\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\">iteration"
     << "</text>\n";
  os << "<text x=\"18\" y=\"" << fmt((top + bottom) / 2)
     << "\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\" "
     << "transform=\"rotate(-90 18 " << fmt((top + bottom) / 2)
     << ")\">combined test accuracy</text>\n";

  // Bands first, lines on top.
  for (std::size_t a = 0; a < report.arms.size(); ++a) {
    const ArmSummary& arm = report.arms[a];
    const char* color = kPalette[a % 10];
    const auto& curve = arm.mean_curve;
    if (curve.iters.size() > 1) {
      std::ostringstream pts;
      for (std::size_t i = 0; i < curve.iters.size(); ++i) {
        const double e = arm.std_error[i];
        pts << fmt(x_of(static_cast<double>(curve.iters[i]))) << ","
            << fmt(y_of(std::min(1.0, curve.acc[i] + e))) << " ";
      }
      for (std::size_t i = curve.iters.size(); i-- > 0;) {
        const double e = arm.std_error[i];
        pts << fmt(x_of(static_cast<double>(curve.iters[i]))) << ","
            << fmt(y_of(std::max(0.0, curve.acc[i] - e))) << " ";
      }
      os << "<polygon points=\"" << pts.str() << "\" fill=\"" << color
         << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
    }
  }
  for (std::size_t a = 0; a < report.arms.size(); ++a) {
    const ArmSummary& arm = report.arms[a];
    const char* color = kPalette[a % 10];
    std::ostringstream pts;
    for (std::size_t i = 0; i < arm.mean_curve.iters.size(); ++i) {
      pts << fmt(x_of(static_cast<double>(arm.mean_curve.iters[i]))) << ","
          << fmt(y_of(arm.mean_curve.acc[i])) << " ";
    }
    os << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.8\"/>\n";
  }

  // a_scratch reference line and legend.
  os << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(y_of(report.a_scratch)) << "\" x2=\""
     << fmt(right) << "\" y2=\"" << fmt(y_of(report.a_scratch))
     << "\" stroke=\"#555555\" stroke-width=\"1\" stroke-dasharray=\"6,4\"/>\n";
  for (std::size_t a = 0; a < report.arms.size(); ++a) {
    const double y = top + 18 + 20 * static_cast<double>(a);
    os << "<rect x=\"" << fmt(right + 16) << "\" y=\"" << fmt(y - 10)
       << "\" width=\"14\" height=\"14\" fill=\"" << kPalette[a % 10] << "\"/>\n";
    os << "<text x=\"" << fmt(right + 36) << "\" y=\"" << fmt(y + 2)
       << "\" font-size=\"12\" font-family=\"sans-serif\">" << report.arms[a].arm << " (n="
       << report.arms[a].seed_count << ")</text>\n";
  }
  os << "<text x=\"" << fmt(right + 16) << "\" y=\""
     << fmt(top + 26 + 20 * static_cast<double>(report.arms.size()))
     << "\" font-size=\"12\" font-family=\"sans-serif\">a_scratch = "
     << fmt(report.a_scratch, "%.4f") << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string curves_csv(const SpeedReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "iteration";
  for (const ArmSummary& arm : report.arms) {
    os << "," << arm.arm << "_mean," << arm.arm << "_stderr";
  }
  os << "\n";
  // Arms can have different eval grids; emit the union, blank where absent.
  std::vector<std::int64_t> grid;
  for (const ArmSummary& arm : report.arms) {
    grid.insert(grid.end(), arm.mean_curve.iters.begin(), arm.mean_curve.iters.end());
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  for (std::int64_t it : grid) {
    os << it;
    for (const ArmSummary& arm : report.arms) {
      const auto& iters = arm.mean_curve.iters;
      const auto pos = std::lower_bound(iters.begin(), iters.end(), it);
      if (pos != iters.end() && *pos == it) {
        const std::size_t i = static_cast<std::size_t>(pos - iters.begin());
        os << "," << arm.mean_curve.acc[i] << "," << arm.std_error[i];
      } else {
        os << ",,";
      }
    }
    os << "\n";
  }
  return os.str();
}

void write_report_files(const SpeedReport& report, const std::string& out_dir,
                        const std::vector<std::string>& warnings) {
  fs::create_directories(out_dir);
  std::string md = report_markdown(report);
  if (!warnings.empty()) {
    std::vector<std::string> sorted = warnings;
    std::sort(sorted.begin(), sorted.end());
    md += "\nWarnings:\n";
    for (const std::string& w : sorted) md += "- " + w + "\n";
  }
  write_text_file((fs::path(out_dir) / "report.md").string(), md);
  write_text_file((fs::path(out_dir) / "report.csv").string(), report_csv(report));
  write_text_file((fs::path(out_dir) / "curves.csv").string(), curves_csv(report));
  write_text_file((fs::path(out_dir) / "curves.svg").string(), render_curves_svg(report));
}

SpeedReport report_from_dir(const std::string& records_dir, const DirReportOptions& options,
                            std::vector<std::string>& warnings_out) {
  if (!fs::is_directory(records_dir)) {
    throw std::runtime_error("report: '" + records_dir + "' is not a directory");
  }
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(records_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());

  std::map<std::string, std::vector<RunRecord>> by_arm;
  for (const std::string& file : files) {
    try {
      RunRecord rec = parse_run_record(read_text_file(file));
      if (rec.aborted) {
        warnings_out.push_back(fs::path(file).filename().string() + ": aborted run (" +
                               rec.abort_reason + "), skipped");
        continue;
      }
      by_arm[rec.arm].push_back(std::move(rec));
    } catch (const std::exception& ex) {
      warnings_out.push_back(fs::path(file).filename().string() + ": " + ex.what());
    }
  }
  if (by_arm.empty()) {
    throw std::runtime_error("report: no usable run records in " + records_dir);
  }
  if (by_arm.count(options.scratch_arm) == 0) {
    throw std::runtime_error("report: scratch arm '" + options.scratch_arm + "' not found");
  }
  for (auto& [arm, recs] : by_arm) {
    std::sort(recs.begin(), recs.end(),
              [](const RunRecord& a, const RunRecord& b) { return a.seed < b.seed; });
  }
  return aggregate(by_arm, options.scratch_arm, options.r_list, options.target_mode);
}

void write_sequence_ledger(const SequenceResult& result, const std::string& out_dir) {
  fs::create_directories(out_dir);

  json seeds = json::array();
  for (const SequenceSeedResult& seed : result.per_seed) {
    json tasks = json::array();
    for (const TaskLedgerEntry& t : seed.tasks) {
      json jt{{"task", t.task_index},
              {"classes_seen", t.classes_seen},
              {"max_possible_accuracy", t.max_possible_accuracy},
              {"a_scratch", t.a_scratch}};
      jt["continuous_iterations"] =
          t.continuous_iterations ? json(*t.continuous_iterations) : json(nullptr);
      jt["scratch_iterations"] =
          t.scratch_iterations ? json(*t.scratch_iterations) : json(nullptr);
      tasks.push_back(std::move(jt));
    }
    json js{{"seed", seed.seed}, {"tasks", tasks}};
    js["cumulative_continuous"] =
        seed.cumulative_continuous ? json(*seed.cumulative_continuous) : json(nullptr);
    js["cumulative_scratch"] =
        seed.cumulative_scratch ? json(*seed.cumulative_scratch) : json(nullptr);
    seeds.push_back(std::move(js));
  }
  const json ledger{{"schema_version", kSchemaVersion},
                    {"kind", "sequence_ledger"},
                    {"seeds", seeds}};
  write_text_file((fs::path(out_dir) / "sequence_ledger.json").string(), ledger.dump(2));

  std::ostringstream md;
  md << "| Seed | Task | Classes | a_scratch | s(continuous) | s(scratch) |\n";
  md << "|---|---|---|---|---|---|\n";
  for (const SequenceSeedResult& seed : result.per_seed) {
    for (const TaskLedgerEntry& t : seed.tasks) {
      md << "| " << seed.seed << " | " << t.task_index << " | " << t.classes_seen << " | "
         << fmt(t.a_scratch, "%.4f") << " | "
         << (t.continuous_iterations ? std::to_string(*t.continuous_iterations) : "/")
         << " | " << (t.scratch_iterations ? std::to_string(*t.scratch_iterations) : "/")
         << " |\n";
    }
  }
  md << "\n| Seed | Cumulative continuous | Cumulative scratch |\n|---|---|---|\n";
  for (const SequenceSeedResult& seed : result.per_seed) {
    md << "| " << seed.seed << " | "
       << (seed.cumulative_continuous ? std::to_string(*seed.cumulative_continuous) : "/")
       << " | "
       << (seed.cumulative_scratch ? std::to_string(*seed.cumulative_scratch) : "/")
       << " |\n";
  }
  write_text_file((fs::path(out_dir) / "sequence_summary.md").string(), md.str());
}

void write_sweep_summary(const SweepConfig& config, const SweepResult& result,
                         const std::string& out_dir) {
  fs::create_directories(out_dir);

  std::ostringstream md, csv;
  md << "Sweep of `" << config.parameter << "` on arm `" << config.base_arm << "`\n\n";
  md << "| " << config.parameter << " | Max Acc |";
  csv << config.parameter << ",max_acc";
  for (int r : config.base.r_list) {
    md << " L_" << r << " |";
    csv << ",L_" << r;
  }
  md << "\n|---|---|";
  for (std::size_t i = 0; i < config.base.r_list.size(); ++i) md << "---|";
  md << "\n";
  csv << "\n";

  for (std::size_t i = 0; i < result.grid.size(); ++i) {
    const SpeedReport& report = result.per_value[i].report;
    const auto arm_it = std::find_if(
        report.arms.begin(), report.arms.end(),
        [&](const ArmSummary& a) { return a.arm == config.base_arm; });
    if (arm_it == report.arms.end()) continue;
    md << "| " << fmt(result.grid[i], "%g") << " | " << fmt(arm_it->max_acc, "%.4f") << " |";
    csv << fmt(result.grid[i], "%g") << "," << fmt(arm_it->max_acc, "%.6f");
    for (int r : config.base.r_list) {
      const auto& v = arm_it->l_r.at(r);
      const std::string cell = v ? (std::isinf(*v) ? "inf" : "x" + fmt(*v, "%.2f")) : "/";
      md << " " << cell << " |";
      csv << "," << (v ? (std::isinf(*v) ? "inf" : fmt(*v, "%.6f")) : "/");
    }
    md << "\n";
    csv << "\n";
  }
  write_text_file((fs::path(out_dir) / "sweep_summary.md").string(), md.str());
  write_text_file((fs::path(out_dir) / "sweep_summary.csv").string(), csv.str());
}

}  // namespace contrain
