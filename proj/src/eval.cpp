#include "clutter_em/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "clutter_em/error.hpp"
#include "clutter_em/init.hpp"

namespace clutter {

std::string_view to_string(Matching m) {
  return m == Matching::PowerOrder ? "PowerOrder" : "BestPermutation";
}

Matching matching_from_string(std::string_view name) {
  if (name == "PowerOrder") return Matching::PowerOrder;
  if (name == "BestPermutation") return Matching::BestPermutation;
  throw ConfigError("matching", fmt::format("unknown matching '{}' (expected PowerOrder or BestPermutation)", name));
}

int classification_error(std::span<const int> estimated, std::span<const int> truth, Matching matching) {
  if (estimated.size() != truth.size()) {
    throw StructuralError(fmt::format("label vectors differ in length ({} vs {})", estimated.size(), truth.size()));
  }
  int L = 0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    if (estimated[k] < 1 || truth[k] < 1) throw StructuralError("labels must be positive");
    L = std::max({L, estimated[k], truth[k]});
  }
  if (matching == Matching::PowerOrder) {
    int errors = 0;
    for (std::size_t k = 0; k < truth.size(); ++k) errors += estimated[k] != truth[k] ? 1 : 0;
    return errors;
  }
  if (L > 8) throw StructuralError(fmt::format("best-permutation matching supports at most 8 classes, got {}", L));

  // confusion(e, t) = number of bins with estimate e and truth t
  std::vector<int> confusion(static_cast<std::size_t>(L * L), 0);
  for (std::size_t k = 0; k < truth.size(); ++k) ++confusion[(estimated[k] - 1) * L + (truth[k] - 1)];
  std::vector<int> perm(static_cast<std::size_t>(L));
  std::iota(perm.begin(), perm.end(), 0);
  int best_correct = 0;
  do {
    int correct = 0;
    for (int e = 0; e < L; ++e) correct += confusion[e * L + perm[e]];
    best_correct = std::max(best_correct, correct);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<int>(truth.size()) - best_correct;
}

double rmsce(std::span<const int> error_counts) {
  if (error_counts.empty()) throw StructuralError("RMSCE of an empty list");
  double s = 0.0;
  for (int e : error_counts) s += static_cast<double>(e) * e;
  return std::sqrt(s / static_cast<double>(error_counts.size()));
}

TrialOutcome run_trial(const ScenarioConfig& scenario, const FitConfig& method, std::uint64_t master_seed,
                       std::uint64_t trial_index, const MonteCarloOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const Rng trial_rng = Rng::derive(master_seed, "trial", trial_index);
  TrialOutcome out;
  out.seed = trial_rng.seed();

  Rng data_rng = trial_rng.split("data", 0);
  const LabeledSnapshotSet data = generate(scenario, data_rng);
  const int K = static_cast<int>(data.true_labels.size());
  try {
    Rng init_rng = trial_rng.split("init", 0);
    const MixtureParams init = init_params(data.snapshots, method.num_classes, method.model_kind, init_rng, method.ranks);
    const FitResult fit = run_em(data.snapshots, method, init);
    out.error_count = classification_error(fit.labels, data.true_labels, options.matching);
    if (options.report_best_permutation) {
      out.error_count_best_permutation = classification_error(fit.labels, data.true_labels, Matching::BestPermutation);
    }
    out.final_ll = fit.ll_trace.back();
    out.iterations = fit.iterations_run;
    out.ll_decreases = fit.ll_decreases;
  } catch (const NumericalError& e) {
    out.failed = true;
    out.failure = e.what();
    out.error_count = K;
    out.error_count_best_permutation = K;
    spdlog::warn("trial {} failed: {}", trial_index, e.what());
  }
  out.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

BenchmarkReport monte_carlo(const ScenarioConfig& scenario, const FitConfig& method, int trials,
                            std::uint64_t master_seed, const MonteCarloOptions& options) {
  if (trials < 1) throw ConfigError("trials", "must be at least 1");
  scenario.validate();
  method.validate();

  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));
  unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
  threads = std::min<unsigned>(threads, static_cast<unsigned>(trials));

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < trials; i = next++) {
      outcomes[static_cast<std::size_t>(i)] = run_trial(scenario, method, master_seed, static_cast<std::uint64_t>(i), options);
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  BenchmarkReport report;
  report.scenario = scenario;
  report.method = method;
  report.matching = options.matching;
  report.master_seed = master_seed;
  report.trials = trials;

  std::vector<int> errors;
  std::vector<int> errors_perm;
  double runtime = 0.0;
  for (const auto& o : outcomes) {
    errors.push_back(o.error_count);
    errors_perm.push_back(o.error_count_best_permutation);
    ++report.error_histogram[o.error_count];
    report.failed_trials += o.failed ? 1 : 0;
    report.total_iterations += o.iterations;
    report.total_ll_decreases += o.ll_decreases;
    runtime += o.runtime_ms;
  }
  report.rmsce = rmsce(errors);
  if (options.report_best_permutation) report.rmsce_best_permutation = rmsce(errors_perm);
  report.mean_runtime_ms = runtime / trials;
  report.outcomes = std::move(outcomes);
  return report;
}

}  // namespace clutter
