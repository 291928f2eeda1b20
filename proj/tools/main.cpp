#include <iostream>

#include <CLI11.hpp>

#include "advcongest/experiment.hpp"
#include "cli.hpp"

namespace fs = std::filesystem;
using namespace advcongest;

int main(int argc, char** argv) {
  CLI::App app{"Adversarial CONGEST broadcast simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  std::string out;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--set", sets, "Override a config field, key.path=value");
    sub->add_option("--out", out, "Output directory");
  };

  auto* simulate = app.add_subcommand("simulate", "Run trials and write per-trial reports and results.csv");
  common(simulate);

  std::string vary;
  std::vector<std::string> values;
  auto* sweep = app.add_subcommand("sweep", "Run simulate for each value of one config field");
  common(sweep);
  sweep->add_option("--vary", vary, "Config field to vary")->required();
  sweep->add_option("--values", values, "Values (JSON literals or strings); may be empty")->expected(0, -1);

  cli::CoverOptions cover;
  auto* verify = app.add_subcommand("verify-cover", "Check the covering properties of a family on the config graph");
  common(verify);
  verify->add_option("--flavor", cover.flavor, "hash, sampled, expander, expander_directed or trivial");
  verify->add_option("--L", cover.L, "Path length bound (default 7 * diameter)");
  verify->add_option("--k", cover.k, "Fault set size");
  verify->add_option("--seeds", cover.seeds, "Number of family seeds");
  verify->add_flag("--relaxed", cover.relaxed, "Use the distance form of the check");

  auto* cond = app.add_subcommand("conductance", "Conductance of the config graph");
  common(cond);

  std::string report_path, transcript_path;
  auto* replay = app.add_subcommand("replay", "Re-execute a recorded trial and compare transcripts");
  replay->add_option("--report", report_path, "trial_NNNN.json")->required()->check(CLI::ExistingFile);
  replay->add_option("--transcript", transcript_path, "trial_NNNN.jsonl")->required()->check(CLI::ExistingFile);
  replay->add_option("--out", out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    std::optional<fs::path> file;
    if (!config_path.empty()) file = config_path;
    const fs::path run_out = out.empty() ? "out" : out;
    if (*simulate) return cli::cmd_simulate(cli::load_config(file, sets), run_out, std::cout);
    if (*sweep) return cli::cmd_sweep(cli::load_config(file, sets), vary, values, run_out, std::cout);
    if (*verify) return cli::cmd_verify_cover(cli::load_config(file, sets), cover, out, std::cout);
    if (*cond) return cli::cmd_conductance(cli::load_config(file, sets), out, std::cout);
    if (*replay) return cli::cmd_replay(report_path, transcript_path, out, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return cli::kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kConfigError;
  }
  return cli::kOk;
}
