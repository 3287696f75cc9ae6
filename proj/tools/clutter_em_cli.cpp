// clutter-em: simulate, fit and benchmark EM clutter classification.

#include <cstdlib>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "clutter_em/commands.hpp"

namespace {

void configure_logging(const std::string& level) {
  auto parsed = spdlog::level::from_str(level);
  // from_str maps unknown names to "off"
  if (parsed == spdlog::level::off && level != "off") parsed = spdlog::level::warn;
  spdlog::set_level(parsed);
  spdlog::set_pattern("[%l] %v");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EM-based classification of radar clutter range bins"};
  app.require_subcommand(1);

  clutter::RunManifest manifest;
  std::string config;
  std::string out;
  std::string data;
  std::string truth;
  std::uint64_t seed = 0;
  int trials = 0;

  const char* env_level = std::getenv("CLUTTER_EM_LOG");
  manifest.verbosity = env_level ? env_level : "warn";

  auto* simulate = app.add_subcommand("simulate", "Generate a labelled synthetic range profile");
  simulate->add_option("--config", config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out, "Output directory")->required();
  simulate->add_option("--seed", seed, "Override the scenario seed");

  auto* fit = app.add_subcommand("fit", "Fit the mixture to a range profile and classify its bins");
  fit->add_option("--config", config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  fit->add_option("--data", data, "Range profile file")->required()->check(CLI::ExistingFile);
  fit->add_option("--truth", truth, "Optional true labels CSV")->check(CLI::ExistingFile);
  fit->add_option("--out", out, "Output directory")->required();
  fit->add_option("--seed", seed, "Override the initialization seed");

  auto* benchmark = app.add_subcommand("benchmark", "Monte Carlo RMSCE for one scenario and method");
  benchmark->add_option("--config", config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  benchmark->add_option("--trials", trials, "Number of trials")->check(CLI::PositiveNumber);
  benchmark->add_option("--seed", seed, "Master seed");
  benchmark->add_option("--out", out, "Output directory")->required();

  auto* tables = app.add_subcommand("tables", "RMSCE grid over configured scenarios and methods");
  tables->add_option("--config", config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  tables->add_option("--trials", trials, "Number of trials per cell")->check(CLI::PositiveNumber);
  tables->add_option("--seed", seed, "Master seed");
  tables->add_option("--out", out, "Output directory")->required();

  for (auto* sub : {simulate, fit, benchmark, tables}) {
    sub->add_option("--log-level", manifest.verbosity, "trace, debug, info, warn, error or off");
  }

  CLI11_PARSE(app, argc, argv);
  configure_logging(manifest.verbosity);

  auto* chosen = app.get_subcommands().front();
  if (chosen == simulate) manifest.command = clutter::Command::Simulate;
  if (chosen == fit) manifest.command = clutter::Command::Fit;
  if (chosen == benchmark) manifest.command = clutter::Command::Benchmark;
  if (chosen == tables) manifest.command = clutter::Command::Tables;

  manifest.config_path = config;
  manifest.output_dir = out;
  if (!data.empty()) manifest.data_path = data;
  if (!truth.empty()) manifest.truth_path = truth;
  if (chosen->count("--seed") > 0) manifest.seed = seed;
  if (chosen->get_option_no_throw("--trials") && chosen->count("--trials") > 0) manifest.trials = trials;

  return clutter::run_command(manifest);
}
