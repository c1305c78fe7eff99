#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace adpnet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDiverged = 3;

struct RunOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  /// Independent runs, one per seed, written to <out>/seed-<s>.
  std::vector<std::uint64_t> seeds;
};

/// Files written into the run directory.
inline constexpr const char* kReportFile = "report.csv";
inline constexpr const char* kEpisodesFile = "episodes.csv";
inline constexpr const char* kDiagnosticsFile = "diagnostics.csv";
inline constexpr const char* kCheckpointFile = "checkpoint.json";
inline constexpr const char* kResolvedConfigFile = "config.resolved.json";

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_verify(bool perturb_care, std::ostream& out);
int cmd_export_plots(const std::string& run_dir, std::ostream& out, std::ostream& err);

}  // namespace adpnet::cli
