#include "adpnet/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "adpnet/config.hpp"
#include "adpnet/errors.hpp"
#include "adpnet/serialization.hpp"
#include "adpnet/tasks.hpp"
#include "adpnet/verify.hpp"

namespace adpnet::cli {
namespace {

namespace fs = std::filesystem;

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void write_run(const TrainResult& result, const fs::path& dir) {
  fs::create_directories(dir);
  const int outputs = result.checkpoint.config.task.outputs;
  {
    auto out = open_output(dir / kReportFile);
    write_trajectory_csv(result.report, outputs, out);
  }
  {
    auto out = open_output(dir / kEpisodesFile);
    write_episodes_csv(result.report, out);
  }
  {
    auto out = open_output(dir / kDiagnosticsFile);
    out << std::setprecision(17);
    result.report.diagnostics.write_csv(out);
  }
  io::write_json_file(io::to_json(result.checkpoint), (dir / kCheckpointFile).string());
  io::write_json_file(io::to_json(result.checkpoint.config), (dir / kResolvedConfigFile).string());
}

// Runs one config; returns the exit code and logs to the given streams.
int run_one(const TrainConfig& config, std::ostream& out, std::ostream& err) {
  const TrainResult result = train(config);
  write_run(result, config.output_dir);
  const auto& episodes = result.report.episodes;
  out << "seed " << config.seed << ": " << episodes.size() << " episodes";
  if (!episodes.empty()) {
    out << ", tracking mse first " << episodes.front().tracking_mse << " last " << episodes.back().tracking_mse;
  }
  out << ", " << std::fixed << std::setprecision(2) << result.report.wall_clock_seconds << " s -> " << config.output_dir
      << '\n'
      << std::defaultfloat;
  if (result.report.diverged) {
    err << "seed " << config.seed << ": training diverged: " << result.report.failure << '\n';
    return kExitDiverged;
  }
  return kExitOk;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  TrainConfig base;
  try {
    base = load_config(options.config_path);
    if (options.seed) base.seed = *options.seed;
    if (options.out_dir) base.output_dir = *options.out_dir;
  } catch (const ConfigurationError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  std::vector<TrainConfig> runs;
  if (options.seeds.empty()) {
    runs.push_back(base);
  } else {
    for (const auto seed : options.seeds) {
      TrainConfig c = base;
      c.seed = seed;
      c.output_dir = (fs::path(base.output_dir) / ("seed-" + std::to_string(seed))).string();
      runs.push_back(c);
    }
  }

  std::vector<int> codes(runs.size(), kExitOk);
  std::vector<std::string> logs(runs.size());
  std::vector<std::string> errors(runs.size());
  const long count = static_cast<long>(runs.size());
#pragma omp parallel for schedule(dynamic) if (count > 1)
  for (long i = 0; i < count; ++i) {
    std::ostringstream o;
    std::ostringstream e;
    try {
      codes[static_cast<std::size_t>(i)] = run_one(runs[static_cast<std::size_t>(i)], o, e);
    } catch (const ConfigurationError& ex) {
      e << "config error: " << ex.what() << '\n';
      codes[static_cast<std::size_t>(i)] = kExitConfig;
    } catch (const DivergenceError& ex) {
      e << "seed " << runs[static_cast<std::size_t>(i)].seed << ": plant diverged at t = " << ex.time() << ": "
        << ex.what() << '\n';
      codes[static_cast<std::size_t>(i)] = kExitDiverged;
    } catch (const std::exception& ex) {
      e << "error: " << ex.what() << '\n';
      codes[static_cast<std::size_t>(i)] = kExitConfig;
    }
    logs[static_cast<std::size_t>(i)] = o.str();
    errors[static_cast<std::size_t>(i)] = e.str();
  }

  int code = kExitOk;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    out << logs[i];
    err << errors[i];
    if (codes[i] == kExitConfig || (codes[i] == kExitDiverged && code != kExitConfig)) code = codes[i];
  }
  return code;
}

int cmd_verify(bool perturb_care, std::ostream& out) {
  const auto started = std::chrono::steady_clock::now();
  const auto results = run_oracle_suite(perturb_care);
  bool all = true;
  out << std::left << std::setw(7) << "result" << std::setw(50) << "property" << std::setw(14) << "value"
      << "tolerance\n";
  for (const auto& r : results) {
    all = all && r.passed;
    out << std::setw(7) << (r.passed ? "PASS" : "FAIL") << std::setw(50) << r.name << std::setw(14) << std::setprecision(4)
        << r.value << r.tolerance;
    if (!r.detail.empty()) out << "  " << r.detail;
    out << '\n';
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  out << (all ? "all properties passed" : "verification FAILED") << " in " << std::setprecision(3) << seconds << " s\n";
  return all ? kExitOk : kExitVerifyFailed;
}

int cmd_export_plots(const std::string& run_dir, std::ostream& out, std::ostream& err) {
  const fs::path dir(run_dir);
  const fs::path report = dir / kReportFile;
  const fs::path episodes = dir / kEpisodesFile;
  const fs::path diagnostics = dir / kDiagnosticsFile;
  for (const auto& p : {report, episodes, diagnostics}) {
    if (!fs::is_regular_file(p)) {
      err << "missing run file " << p.string() << '\n';
      return kExitConfig;
    }
  }
  std::ifstream in(report, std::ios::binary);
  std::string line;
  if (!std::getline(in, line)) {
    err << "empty report " << report.string() << '\n';
    return kExitConfig;
  }
  const auto header = split_csv_line(line);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto& h = header[i];
    if (h == "episode" || h == "t" || h.rfind("y_", 0) == 0) keep.push_back(i);
  }
  if (keep.size() < 4) {
    err << "report " << report.string() << " has no trajectory columns\n";
    return kExitConfig;
  }

  const fs::path plots = dir / "plots";
  try {
    fs::create_directories(plots);
    auto trajectory = open_output(plots / "trajectory.csv");
    const auto emit = [&](const std::vector<std::string>& cells) {
      for (std::size_t k = 0; k < keep.size(); ++k) trajectory << (k ? "," : "") << cells.at(keep[k]);
      trajectory << '\n';
    };
    emit(header);
    long rows = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto cells = split_csv_line(line);
      if (cells.size() != header.size()) {
        err << "malformed row " << rows + 2 << " in " << report.string() << '\n';
        return kExitConfig;
      }
      emit(cells);
      ++rows;
    }

    // Per-episode learning curves are the episodes table as written.
    fs::copy_file(episodes, plots / "curves.csv", fs::copy_options::overwrite_existing);
    fs::copy_file(diagnostics, plots / "diagnostics.csv", fs::copy_options::overwrite_existing);
    out << "wrote " << rows << " trajectory rows to " << (plots / "trajectory.csv").string() << '\n';
  } catch (const std::exception& e) {
    err << "export failed: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace adpnet::cli
