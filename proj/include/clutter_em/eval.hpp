#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clutter_em/em.hpp"
#include "clutter_em/scenario.hpp"

namespace clutter {

/// How estimated class indices are matched to the true ones.
enum class Matching {
  PowerOrder,       ///< compare indices directly (init orders classes by ascending power)
  BestPermutation,  ///< minimum over all relabelings of the estimate, L <= 8
};

std::string_view to_string(Matching m);
Matching matching_from_string(std::string_view name);

/// Number of bins whose class is not correctly identified.
int classification_error(std::span<const int> estimated, std::span<const int> truth,
                         Matching matching = Matching::PowerOrder);

/// Root mean square of the error counts.
double rmsce(std::span<const int> error_counts);

struct TrialOutcome {
  int error_count = 0;
  double final_ll = 0.0;
  int iterations = 0;
  int ll_decreases = 0;  ///< iterations whose log-likelihood dropped by more than 1e-6 relative
  bool failed = false;
  std::string failure;
  std::uint64_t seed = 0;
  int error_count_best_permutation = 0;
  double runtime_ms = 0.0;
};

struct MonteCarloOptions {
  Matching matching = Matching::PowerOrder;
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 1;
  /// Also compute the BestPermutation RMSCE alongside the primary matching.
  bool report_best_permutation = false;
};

struct BenchmarkReport {
  ScenarioConfig scenario;
  FitConfig method;
  Matching matching = Matching::PowerOrder;
  std::uint64_t master_seed = 0;
  int trials = 0;
  double rmsce = 0.0;
  std::optional<double> rmsce_best_permutation;
  std::map<int, int> error_histogram;
  int failed_trials = 0;
  int total_iterations = 0;
  int total_ll_decreases = 0;
  double mean_runtime_ms = 0.0;
  std::vector<TrialOutcome> outcomes;
};

/// One seeded trial: generate data, initialize, fit, score.
TrialOutcome run_trial(const ScenarioConfig& scenario, const FitConfig& method, std::uint64_t master_seed,
                       std::uint64_t trial_index, const MonteCarloOptions& options = {});

/// Independent trials on substreams (master_seed, "trial", i). Failed trials
/// count as K errors. Everything except the timing fields is a pure function
/// of the arguments, whatever the thread count.
BenchmarkReport monte_carlo(const ScenarioConfig& scenario, const FitConfig& method, int trials,
                            std::uint64_t master_seed, const MonteCarloOptions& options = {});

}  // namespace clutter
