#include "clutter_em/init.hpp"

#include <algorithm>
#include <vector>

#include <fmt/format.h>

#include "clutter_em/error.hpp"

namespace clutter {

InitRecipe InitRecipe::user_supplied(MixtureParams params) {
  InitRecipe r;
  r.kind = Kind::UserSupplied;
  r.params = std::move(params);
  return r;
}

RVector chunk_means(std::span<const double> sorted, int num_classes) {
  const auto K = static_cast<Index>(sorted.size());
  if (num_classes < 1 || K < num_classes) {
    throw StructuralError(fmt::format("cannot split {} values into {} chunks", K, num_classes));
  }
  const Index chunk = K / num_classes;
  RVector means(num_classes);
  for (int l = 0; l < num_classes; ++l) {
    const Index begin = l * chunk;
    const Index end = (l == num_classes - 1) ? K : begin + chunk;
    double s = 0.0;
    for (Index i = begin; i < end; ++i) s += sorted[static_cast<std::size_t>(i)];
    means(l) = s / static_cast<double>(end - begin);
  }
  return means;
}

RVector whitened_powers(const SnapshotSet& z, const HermitianMatrix& structure) {
  return CholeskyFactor(structure).quad_forms(z.data()) / static_cast<double>(z.n_channels());
}

HermitianMatrix random_structure(Index n_channels, Index n_bins, Rng& rng) {
  const CMatrix x = circular_normal_matrix(n_channels, n_bins, rng);
  const CMatrix xx = x * x.adjoint();
  return HermitianMatrix(xx / xx.trace().real(), 1e-8);
}

MixtureParams init_params(const SnapshotSet& z, int num_classes, CovarianceModel model, Rng& rng,
                          const std::optional<std::vector<int>>& ranks) {
  const Index n = z.n_channels();
  const Index K = z.n_bins();
  if (num_classes < 1) throw StructuralError("need at least one class");
  if (K < n) throw StructuralError(fmt::format("initialization needs K >= N (K = {}, N = {})", K, n));

  const HermitianMatrix s = random_structure(n, K, rng);
  RVector g = whitened_powers(z, s);
  std::vector<double> sorted(g.data(), g.data() + g.size());
  std::sort(sorted.begin(), sorted.end());
  const RVector powers = chunk_means(sorted, num_classes);

  MixtureParams params;
  params.priors = RVector::Constant(num_classes, 1.0 / num_classes);

  switch (model) {
    case CovarianceModel::General: {
      GeneralCovariance c;
      for (int l = 0; l < num_classes; ++l) c.classes.push_back(s.scaled(powers(l)));
      params.covariance = std::move(c);
      break;
    }
    case CovarianceModel::ScaledCommon: {
      // sigma2 * S == (sigma2 / N) * (N S), with trace(N S) == N.
      params.covariance = ScaledCommonCovariance{s.scaled(static_cast<double>(n)), powers / static_cast<double>(n)};
      break;
    }
    case CovarianceModel::LowRankNoise: {
      if (n < 2) throw StructuralError("low-rank model needs N >= 2");
      if (ranks) {
        if (static_cast<int>(ranks->size()) != num_classes) throw StructuralError("one rank per class required");
        for (int l = 0; l < num_classes; ++l) {
          const int r = (*ranks)[static_cast<std::size_t>(l)];
          if (r < 1 || r > n - 1) throw StructuralError(fmt::format("rank of class {} outside [1, {}]", l + 1, n - 1));
        }
      }
      const auto eig = hermitian_eig(s);
      const double noise = powers(0) * eig.eigenvalues(n - 1);
      if (!(noise > 0.0)) throw NumericalError("initial noise floor is not positive");
      LowRankNoiseCovariance c{noise, {}, std::vector<int>(num_classes, static_cast<int>(n - 1))};
      for (int l = 0; l < num_classes; ++l) {
        RVector lambda = RVector::Zero(n);
        for (Index m = 0; m < n - 1; ++m) lambda(m) = std::max(powers(l) * eig.eigenvalues(m) - noise, 0.0);
        c.clutter.emplace_back(eig.eigenvectors * lambda.cast<Complex>().asDiagonal() * eig.eigenvectors.adjoint(), 1e-8);
      }
      params.covariance = std::move(c);
      break;
    }
  }
  return params;
}

MixtureParams resolve_init(const InitRecipe& recipe, const SnapshotSet& z, const FitConfig& config) {
  if (recipe.kind == InitRecipe::Kind::UserSupplied) {
    if (!recipe.params) throw ConfigError("init.params", "user-supplied initialization without parameters");
    recipe.params->validate();
    return *recipe.params;
  }
  Rng rng = Rng::derive(recipe.seed, "init", 0);
  return init_params(z, config.num_classes, config.model_kind, rng, config.ranks);
}

}  // namespace clutter
