#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "clutter_em/io.hpp"

namespace clutter {

enum class Command { Simulate, Fit, Benchmark, Tables };

std::string_view to_string(Command c);

/// One CLI invocation.
struct RunManifest {
  Command command = Command::Simulate;
  std::filesystem::path config_path;
  std::filesystem::path output_dir;
  std::optional<std::filesystem::path> data_path;   ///< fit
  std::optional<std::filesystem::path> truth_path;  ///< fit
  std::optional<std::uint64_t> seed;                ///< overrides the config seed
  std::optional<int> trials;                        ///< benchmark
  std::string verbosity = "warn";
};

/// Outcome of a command that completed; `flagged` marks partial failures
/// such as failed Monte Carlo trials.
struct CommandStatus {
  bool flagged = false;
  std::string summary;
};

// Each command reads the manifest's config, writes its outputs to
// manifest.output_dir, and throws clutter::Error on failure.
//
//   simulate  -> scenario.json, range_profile.csv, truth_labels.csv
//   fit       -> fit_result.json, fit_labels.csv
//   benchmark -> report.json, timing.json, histogram.csv
//   tables    -> tables.json, tables.csv

CommandStatus cmd_simulate(const RunManifest& manifest);
CommandStatus cmd_fit(const RunManifest& manifest);
CommandStatus cmd_benchmark(const RunManifest& manifest);
CommandStatus cmd_tables(const RunManifest& manifest);

/// Runs the command and maps the result to an exit status: 0 on success,
/// 2 when the run completed with flagged failures, 1 on error. Errors are
/// written as JSON to `error.json` in the output directory and to stderr.
int run_command(const RunManifest& manifest);

/// Machine-readable description of an exception.
json error_to_json(const std::exception& e);

}  // namespace clutter
