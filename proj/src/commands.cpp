#include "clutter_em/commands.hpp"

#include <iostream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "clutter_em/error.hpp"

namespace clutter {

namespace fs = std::filesystem;

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Simulate: return "simulate";
    case Command::Fit: return "fit";
    case Command::Benchmark: return "benchmark";
    case Command::Tables: return "tables";
  }
  return "?";
}

namespace {

void ensure_output_dir(const fs::path& dir) {
  if (dir.empty()) throw ConfigError("--out", "output directory is required");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(fmt::format("cannot create output directory '{}'", dir.string()));
}

template <class T>
const T& require_section(const std::optional<T>& section, std::string_view name, Command c) {
  if (!section) throw ConfigError(std::string(name), fmt::format("section is required by the {} command", to_string(c)));
  return *section;
}

}  // namespace

CommandStatus cmd_simulate(const RunManifest& m) {
  const RunConfig config = parse_config(m.config_path);
  ScenarioConfig scenario = require_section(config.scenario, "scenario", m.command);
  if (m.seed) scenario.seed = *m.seed;
  ensure_output_dir(m.output_dir);

  const LabeledSnapshotSet data = generate(scenario);
  write_text_file(m.output_dir / "scenario.json", canonical_dump(to_json(scenario)));
  write_range_profile(m.output_dir / "range_profile.csv", data.snapshots);
  write_labels(m.output_dir / "truth_labels.csv", data.true_labels);
  return {false, fmt::format("wrote {} snapshots of {} channels", data.snapshots.n_bins(), data.snapshots.n_channels())};
}

CommandStatus cmd_fit(const RunManifest& m) {
  const RunConfig config = parse_config(m.config_path);
  const FitConfig& fit = require_section(config.fit, "fit", m.command);
  if (!m.data_path) throw ConfigError("--data", "fit requires a range profile");
  ensure_output_dir(m.output_dir);

  const SnapshotSet z = load_range_profile(*m.data_path);
  std::optional<std::vector<int>> truth;
  if (m.truth_path) {
    truth = load_labels(*m.truth_path);
    if (static_cast<Index>(truth->size()) != z.n_bins()) {
      throw DataFormatError(0, fmt::format("truth has {} labels but the profile has {} bins", truth->size(), z.n_bins()));
    }
  }

  InitRecipe recipe = config.init;
  if (m.seed) recipe.seed = *m.seed;
  const MixtureParams init = resolve_init(recipe, z, fit);
  const FitResult result = run_em(z, fit, init);

  json out = to_json(result);
  out["fit_config"] = to_json(fit);
  out["init_seed"] = recipe.seed;
  std::string csv = "bin_index,true_label,estimated_label\n";
  for (std::size_t k = 0; k < result.labels.size(); ++k) {
    csv += fmt::format("{},{},{}\n", k + 1, truth ? std::to_string((*truth)[k]) : std::string(), result.labels[k]);
  }
  if (truth) {
    out["classification_error"] = {
        {"PowerOrder", classification_error(result.labels, *truth, Matching::PowerOrder)},
        {"BestPermutation", classification_error(result.labels, *truth, Matching::BestPermutation)}};
  }
  write_text_file(m.output_dir / "fit_result.json", canonical_dump(out));
  write_text_file(m.output_dir / "fit_labels.csv", csv);
  return {false, fmt::format("fit {} classes in {} iterations, final log-likelihood {:.6f}", fit.num_classes,
                             result.iterations_run, result.ll_trace.back())};
}

CommandStatus cmd_benchmark(const RunManifest& m) {
  const RunConfig config = parse_config(m.config_path);
  const ScenarioConfig& scenario = require_section(config.scenario, "scenario", m.command);
  const FitConfig& fit = require_section(config.fit, "fit", m.command);
  const int trials = m.trials.value_or(config.trials);
  const std::uint64_t seed = m.seed.value_or(config.seed);
  ensure_output_dir(m.output_dir);

  const auto report = monte_carlo(scenario, fit, trials, seed, {config.matching, config.threads, config.best_permutation});
  write_text_file(m.output_dir / "report.json", canonical_dump(to_json(report)));
  write_text_file(m.output_dir / "timing.json",
                  canonical_dump({{"mean_runtime_ms", report.mean_runtime_ms}, {"trials", report.trials}}));
  std::string csv = "error_count,frequency\n";
  for (const auto& [count, freq] : report.error_histogram) csv += fmt::format("{},{}\n", count, freq);
  write_text_file(m.output_dir / "histogram.csv", csv);
  return {report.failed_trials > 0,
          fmt::format("RMSCE {:.4f} over {} trials ({} failed)", report.rmsce, report.trials, report.failed_trials)};
}

CommandStatus cmd_tables(const RunManifest& m) {
  const RunConfig config = parse_config(m.config_path);
  if (config.grid_scenarios.empty() || config.grid_methods.empty()) {
    throw ConfigError("grid", "tables requires at least one grid scenario and one grid method");
  }
  const int trials = m.trials.value_or(config.trials);
  const std::uint64_t seed = m.seed.value_or(config.seed);
  ensure_output_dir(m.output_dir);

  json rows = json::array();
  json failed = json::array();
  std::string csv = "method";
  for (const auto& s : config.grid_scenarios) csv += "," + s.label;
  csv += "\n";
  int total_failed = 0;
  for (const auto& method : config.grid_methods) {
    json row = json::array();
    json row_failed = json::array();
    csv += method.label;
    for (const auto& s : config.grid_scenarios) {
      const auto report = monte_carlo(s.scenario, method.fit, trials, seed, {config.matching, config.threads, false});
      spdlog::info("{} / {}: RMSCE {:.4f}", method.label, s.label, report.rmsce);
      row.push_back(report.rmsce);
      row_failed.push_back(report.failed_trials);
      total_failed += report.failed_trials;
      csv += "," + format_double(report.rmsce);
    }
    csv += "\n";
    rows.push_back(std::move(row));
    failed.push_back(std::move(row_failed));
  }

  json scenarios = json::array();
  for (const auto& s : config.grid_scenarios) scenarios.push_back({{"label", s.label}, {"scenario", to_json(s.scenario)}});
  json methods = json::array();
  for (const auto& mm : config.grid_methods) methods.push_back({{"label", mm.label}, {"fit", to_json(mm.fit)}});
  const json out = {{"trials", trials},
                    {"master_seed", seed},
                    {"matching", std::string(to_string(config.matching))},
                    {"scenarios", std::move(scenarios)},
                    {"methods", std::move(methods)},
                    {"rmsce", std::move(rows)},
                    {"failed_trials", std::move(failed)}};
  write_text_file(m.output_dir / "tables.json", canonical_dump(out));
  write_text_file(m.output_dir / "tables.csv", csv);
  return {total_failed > 0, fmt::format("{} x {} grid, {} failed trials", config.grid_methods.size(),
                                        config.grid_scenarios.size(), total_failed)};
}

json error_to_json(const std::exception& e) {
  json j = {{"message", e.what()}};
  if (const auto* c = dynamic_cast<const ConfigError*>(&e)) {
    j["type"] = "ConfigError";
    j["key_path"] = c->key_path();
  } else if (const auto* d = dynamic_cast<const DataFormatError*>(&e)) {
    j["type"] = "DataFormatError";
    j["line"] = d->line();
  } else if (const auto* k = dynamic_cast<const ClassCollapseError*>(&e)) {
    j["type"] = "ClassCollapseError";
    j["class_index"] = k->class_index();
    j["iteration"] = k->iteration();
  } else if (dynamic_cast<const NumericalError*>(&e)) {
    j["type"] = "NumericalError";
  } else if (dynamic_cast<const StructuralError*>(&e)) {
    j["type"] = "StructuralError";
  } else if (dynamic_cast<const Error*>(&e)) {
    j["type"] = "Error";
  } else {
    j["type"] = "InternalError";
  }
  return {{"error", std::move(j)}};
}

int run_command(const RunManifest& m) {
  try {
    CommandStatus status;
    switch (m.command) {
      case Command::Simulate: status = cmd_simulate(m); break;
      case Command::Fit: status = cmd_fit(m); break;
      case Command::Benchmark: status = cmd_benchmark(m); break;
      case Command::Tables: status = cmd_tables(m); break;
    }
    spdlog::info("{}: {}", to_string(m.command), status.summary);
    return status.flagged ? 2 : 0;
  } catch (const std::exception& e) {
    const json err = error_to_json(e);
    std::cerr << err.dump() << '\n';
    std::error_code ec;
    if (!m.output_dir.empty() && fs::is_directory(m.output_dir, ec)) {
      try {
        write_text_file(m.output_dir / "error.json", canonical_dump(err));
      } catch (const std::exception&) {
        // stderr already carries the error
      }
    }
    return 1;
  }
}

}  // namespace clutter
