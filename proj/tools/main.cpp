#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adpnet/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Actor-critic training for leaky recurrent networks"};
  app.require_subcommand(1);

  adpnet::cli::RunOptions run;
  std::uint64_t seed = 0;
  std::string out_dir;
  auto* run_cmd = app.add_subcommand("run", "Train from a TOML or JSON config");
  run_cmd->add_option("--config,-c", run.config_path, "Config file (.toml or .json)")->required();
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Override the config seed");
  auto* out_opt = run_cmd->add_option("--out,-o", out_dir, "Override the output directory");
  run_cmd->add_option("--seeds", run.seeds, "Independent runs, one per seed (parallel)")->delimiter(',');

  bool perturb = false;
  auto* verify_cmd = app.add_subcommand("verify", "Run the oracle verification suite");
  verify_cmd->add_flag("--perturb-care", perturb, "Offset CARE solutions (negative control)");

  std::string run_dir;
  auto* export_cmd = app.add_subcommand("export-plots", "Write plot-ready CSVs for a run directory");
  export_cmd->add_option("run_dir", run_dir, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : adpnet::cli::kExitConfig;
  }

  if (*run_cmd) {
    if (*seed_opt) run.seed = seed;
    if (*out_opt) run.out_dir = out_dir;
    return adpnet::cli::cmd_run(run, std::cout, std::cerr);
  }
  if (*verify_cmd) return adpnet::cli::cmd_verify(perturb, std::cout);
  return adpnet::cli::cmd_export_plots(run_dir, std::cout, std::cerr);
}
