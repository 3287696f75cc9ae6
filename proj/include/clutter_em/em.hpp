#pragma once

#include <optional>
#include <span>
#include <vector>

#include "clutter_em/mixture.hpp"
#include "clutter_em/numerics.hpp"

namespace clutter {

/// Model-order selection rule for the clutter ranks.
enum class MosRule { AIC, GIC, BIC };

struct MosCriterion {
  MosRule rule = MosRule::GIC;
  double a = 2.0;  ///< GIC only, a >= 1

  /// k_p: 2 (AIC), 1 + a (GIC), log(2KN) (BIC).
  double penalty_factor(Index n_bins, Index n_channels) const;

  bool operator==(const MosCriterion&) const = default;
};

struct FitConfig {
  CovarianceModel model_kind = CovarianceModel::General;
  int num_classes = 3;
  int h_max = 10;
  int t_max = 10;
  MosCriterion mos_rule;
  /// Known clutter ranks (LowRankNoise only); unset means estimate every iteration.
  std::optional<std::vector<int>> ranks;
  /// Stop when |ll_h - ll_{h-1}| / |ll_{h-1}| < ll_tol; 0 runs all h_max iterations.
  double ll_tol = 0.0;
  double ridge_eps = 1e-8;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  bool operator==(const FitConfig&) const = default;
};

struct FitResult {
  MixtureParams params;
  /// Posteriors under the final parameters.
  Responsibilities responsibilities;
  /// 1-based argmax labels of `responsibilities`.
  std::vector<int> labels;
  /// Log-likelihood of the initial parameters followed by one entry per iteration.
  std::vector<double> ll_trace;
  /// Ranks chosen at each iteration (LowRankNoise with unknown ranks only).
  std::vector<std::vector<int>> rank_trace;
  int iterations_run = 0;

  int ridge_events = 0;        ///< M-steps that needed diagonal regularization
  int noise_floor_events = 0;  ///< LowRankNoise M-steps whose noise estimate was floored
  int ll_decreases = 0;        ///< iterations with a relative likelihood drop above 1e-6
};

/// sum_k log sum_l p_l f(z_k | M_l), evaluated in the log domain.
double log_likelihood(const SnapshotSet& z, const MixtureParams& params);

/// K x L table of log(p_l) + log f(z_k | M_l).
RMatrix log_joint_densities(const SnapshotSet& z, const MixtureParams& params);

/// Posterior class probabilities, normalized per row after a max-shift.
Responsibilities e_step(const SnapshotSet& z, const MixtureParams& params);

/// p_l = (1/K) sum_k q_k(l).
RVector update_priors(const Responsibilities& q);

struct GeneralStep {
  std::vector<HermitianMatrix> covariances;
  std::vector<bool> ridged;
};

/// Weighted sample covariance per class, ridge-regularized when its condition
/// number exceeds 1 / ridge_eps.
GeneralStep m_step_general(const SnapshotSet& z, const Responsibilities& q, double ridge_eps = 1e-8);

struct ScaledStep {
  RVector powers;
  HermitianMatrix structure;  ///< trace == N
  bool ridged = false;
};

/// Alternating maximization of the common-structure objective for t_max
/// rounds starting from m_prev, followed by the trace(M) = N gauge fix.
ScaledStep m_step_scaled(const SnapshotSet& z, const Responsibilities& q, const HermitianMatrix& m_prev,
                         int t_max, double ridge_eps = 1e-8);

struct LowRankStep {
  double noise_power = 0.0;
  std::vector<HermitianMatrix> clutter;
  /// Eigendecompositions of S_l = sum_k q_k(l) z_k z_k^H.
  std::vector<EigenDecomposition> decompositions;
  RVector class_weights;
  bool noise_floored = false;
};

/// Noise floor plus eigenvalue-clamped low-rank clutter for the given ranks.
LowRankStep m_step_lowrank(const SnapshotSet& z, const Responsibilities& q, std::span<const int> ranks);

/// Same as m_step_lowrank, reusing precomputed weighted-scatter decompositions.
LowRankStep lowrank_from_decompositions(std::vector<EigenDecomposition> decompositions, RVector class_weights,
                                        std::span<const int> ranks, Index n_bins);

/// Per-class exhaustive minimization of the penalized rank criterion over
/// r in {1, ..., N-1}; the lowest rank wins ties.
std::vector<int> estimate_ranks(std::span<const EigenDecomposition> decompositions, const Responsibilities& q,
                                double noise_power, const MosCriterion& rule, Index n_bins, Index n_channels);

/// Argmax per row, lowest index on ties. Labels are 1-based.
std::vector<int> classify(const Responsibilities& q);

/// Full EM fit from `init`. Throws ClassCollapseError carrying the iteration.
FitResult run_em(const SnapshotSet& z, const FitConfig& config, const MixtureParams& init);

}  // namespace clutter
