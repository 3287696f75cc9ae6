#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "clutter_em/em.hpp"
#include "clutter_em/mixture.hpp"
#include "clutter_em/rng.hpp"

namespace clutter {

/// How the starting point of a fit is obtained.
struct InitRecipe {
  enum class Kind { Default, UserSupplied };

  Kind kind = Kind::Default;
  std::optional<MixtureParams> params;  ///< set iff kind == UserSupplied
  std::uint64_t seed = 0;

  static InitRecipe user_supplied(MixtureParams params);
};

/// Means of L contiguous chunks of `sorted`. Chunks hold floor(K/L) values;
/// the last chunk absorbs the remainder.
RVector chunk_means(std::span<const double> sorted, int num_classes);

/// Whitened per-bin power g(k) = z_k^H S^{-1} z_k / N.
RVector whitened_powers(const SnapshotSet& z, const HermitianMatrix& structure);

/// Random trace-one structure S = X X^H / tr(X X^H) with X N x K i.i.d. CN(0, 1).
HermitianMatrix random_structure(Index n_channels, Index n_bins, Rng& rng);

/// Starting parameters from equiprobable priors, a random Hermitian structure,
/// and class powers taken from the sorted whitened bin powers.
///
/// LowRankNoise starts from the eigendecomposition of S: the noise floor is
/// sigma2_1 * lambda_min(S) and clutter l keeps the N-1 leading eigenpairs of
/// sigma2_l * S minus that floor. The starting ranks are N-1; `ranks`, when
/// given, is only checked for shape and range.
MixtureParams init_params(const SnapshotSet& z, int num_classes, CovarianceModel model, Rng& rng,
                          const std::optional<std::vector<int>>& ranks = std::nullopt);

/// Resolves a recipe against the data and fit configuration. The default
/// recipe draws from the substream (seed, "init", 0).
MixtureParams resolve_init(const InitRecipe& recipe, const SnapshotSet& z, const FitConfig& config);

}  // namespace clutter
