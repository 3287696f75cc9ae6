#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clutter_em/em.hpp"
#include "clutter_em/eval.hpp"
#include "clutter_em/init.hpp"
#include "clutter_em/scenario.hpp"

namespace clutter {

using json = nlohmann::json;

// Strict (de)serializers: unknown keys and out-of-domain values raise
// ConfigError with the JSON key path of the offending field.

json to_json(const ScenarioConfig& config);
ScenarioConfig scenario_from_json(const json& j, const std::string& path = "scenario");

json to_json(const FitConfig& config);
FitConfig fit_config_from_json(const json& j, const std::string& path = "fit");

json to_json(const CMatrix& m);
CMatrix complex_matrix_from_json(const json& j, const std::string& path);

json to_json(const MixtureParams& params);
MixtureParams mixture_params_from_json(const json& j, const std::string& path = "params");

json to_json(const FitResult& result);
FitResult fit_result_from_json(const json& j, const std::string& path = "");

/// Canonical report form; timing fields only when `include_timing` is set.
json to_json(const BenchmarkReport& report, bool include_timing = false);

/// Sorted keys, fixed indentation, trailing newline.
std::string canonical_dump(const json& j);

/// One labelled scenario / method of a benchmark grid.
struct GridScenario {
  std::string label;
  ScenarioConfig scenario;
};
struct GridMethod {
  std::string label;
  FitConfig fit;
};

/// Everything a CLI run reads from its --config file.
struct RunConfig {
  std::optional<ScenarioConfig> scenario;
  std::optional<FitConfig> fit;
  InitRecipe init;
  std::uint64_t seed = 0;  ///< init seed for `fit`, master seed for `benchmark`/`tables`
  int trials = 200;
  Matching matching = Matching::PowerOrder;
  bool best_permutation = false;
  unsigned threads = 1;
  std::vector<GridScenario> grid_scenarios;
  std::vector<GridMethod> grid_methods;
};

RunConfig run_config_from_json(const json& j);
json to_json(const RunConfig& config);

/// Reads and validates a run configuration file.
RunConfig parse_config(const std::filesystem::path& path);

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Range profile file: line 1 is a JSON header
//   {"layout":"csv-interleaved","n_bins":K,"n_channels":N}
// followed by K rows of 2N comma-separated values Re z_k[1], Im z_k[1], ...

void write_range_profile(std::ostream& out, const SnapshotSet& z);
void write_range_profile(const std::filesystem::path& path, const SnapshotSet& z);
SnapshotSet read_range_profile(std::istream& in);
SnapshotSet load_range_profile(const std::filesystem::path& path);

/// CSV with header `bin_index,label`, 1-based bins and labels.
void write_labels(const std::filesystem::path& path, const std::vector<int>& labels);
std::vector<int> read_labels(std::istream& in);
std::vector<int> load_labels(const std::filesystem::path& path);

/// 17 significant digits, enough for an exact round trip.
std::string format_double(double x);

}  // namespace clutter
