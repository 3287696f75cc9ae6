#include "clutter_em/scenario.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "clutter_em/error.hpp"

namespace clutter {

std::string_view to_string(ScenarioModel model) {
  return model == ScenarioModel::ScaledAR1 ? "ScaledAR1" : "PatchesPlusNoise";
}

ScenarioModel scenario_model_from_string(std::string_view name) {
  if (name == "ScaledAR1") return ScenarioModel::ScaledAR1;
  if (name == "PatchesPlusNoise") return ScenarioModel::PatchesPlusNoise;
  throw ConfigError("model_kind", fmt::format("unknown scenario model '{}' (expected ScaledAR1 or PatchesPlusNoise)", name));
}

int ScenarioConfig::total_bins() const {
  return std::accumulate(class_sizes.begin(), class_sizes.end(), 0);
}

void ScenarioConfig::validate() const {
  if (n_channels < 2) throw ConfigError("N", "must be at least 2");
  if (class_sizes.empty()) throw ConfigError("class_sizes", "needs at least one class");
  for (std::size_t l = 0; l < class_sizes.size(); ++l) {
    if (class_sizes[l] < 1) throw ConfigError(fmt::format("class_sizes[{}]", l), "must be positive");
  }
  const auto L = class_sizes.size();
  if (clutter_powers_db.size() != L) {
    throw ConfigError("clutter_powers_db", fmt::format("has {} entries but there are {} classes", clutter_powers_db.size(), L));
  }
  for (std::size_t l = 0; l < L; ++l) {
    const double p = db_to_linear(clutter_powers_db[l]);
    if (!std::isfinite(p) || !(p > 0.0)) {
      throw ConfigError(fmt::format("clutter_powers_db[{}]", l), "does not map to a positive finite power");
    }
  }
  if (model_kind == ScenarioModel::ScaledAR1) {
    if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("rho", "must lie in [0, 1)");
  } else {
    const double n2 = db_to_linear(noise_power_db);
    if (!std::isfinite(n2) || !(n2 > 0.0)) throw ConfigError("noise_power_db", "does not map to a positive finite power");
    if (angles_deg.size() != L) {
      throw ConfigError("angles_deg", fmt::format("has {} angle sets but there are {} classes", angles_deg.size(), L));
    }
    for (std::size_t l = 0; l < L; ++l) {
      if (angles_deg[l].empty()) throw ConfigError(fmt::format("angles_deg[{}]", l), "angle set is empty");
      for (double a : angles_deg[l]) {
        if (!std::isfinite(a)) throw ConfigError(fmt::format("angles_deg[{}]", l), "angle is not finite");
      }
    }
  }
}

HermitianMatrix covar_ar1(int n, double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw StructuralError(fmt::format("AR(1) coefficient {} outside [0, 1)", rho));
  if (n < 1) throw StructuralError("AR(1) matrix size must be positive");
  RMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = std::pow(rho, std::abs(i - j));
  }
  return HermitianMatrix::from_real(m);
}

CVector steering_vector(int n, double theta_deg) {
  const double s = std::sin(theta_deg * std::numbers::pi / 180.0);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = norm * std::polar(1.0, std::numbers::pi * i * s);
  return v;
}

HermitianMatrix covar_patches(int n, std::span<const double> angles_deg, double sigma_c2, double sigma_n2) {
  if (angles_deg.empty()) throw StructuralError("patch model needs at least one angle");
  if (!(sigma_c2 > 0.0) || !(sigma_n2 > 0.0)) throw StructuralError("patch model powers must be positive");
  CMatrix m = CMatrix::Zero(n, n);
  for (double theta : angles_deg) {
    const CVector v = steering_vector(n, theta);
    m.noalias() += v * v.adjoint();
  }
  m *= sigma_c2;
  m.diagonal().array() += sigma_n2;
  return HermitianMatrix(m);
}

std::vector<HermitianMatrix> class_covariances(const ScenarioConfig& config) {
  config.validate();
  std::vector<HermitianMatrix> out;
  if (config.model_kind == ScenarioModel::ScaledAR1) {
    const auto base = covar_ar1(config.n_channels, config.rho);
    for (double db : config.clutter_powers_db) out.push_back(base.scaled(db_to_linear(db)));
  } else {
    const double n2 = db_to_linear(config.noise_power_db);
    for (int l = 0; l < config.num_classes(); ++l) {
      out.push_back(covar_patches(config.n_channels, config.angles_deg[l],
                                  db_to_linear(config.clutter_powers_db[l]), n2));
    }
  }
  return out;
}

namespace {

MixtureParams true_params_of(const ScenarioConfig& config, const std::vector<HermitianMatrix>& covs) {
  MixtureParams params;
  const int L = config.num_classes();
  params.priors.resize(L);
  for (int l = 0; l < L; ++l) params.priors(l) = static_cast<double>(config.class_sizes[l]) / config.total_bins();

  if (config.model_kind == ScenarioModel::ScaledAR1) {
    // Diagonal of the AR(1) matrix is all ones, so trace == N already.
    ScaledCommonCovariance c{covar_ar1(config.n_channels, config.rho), RVector(L)};
    for (int l = 0; l < L; ++l) c.powers(l) = db_to_linear(config.clutter_powers_db[l]);
    params.covariance = std::move(c);
    return params;
  }

  const double n2 = db_to_linear(config.noise_power_db);
  LowRankNoiseCovariance c;
  c.noise_power = n2;
  for (int l = 0; l < L; ++l) {
    const int r = static_cast<int>(config.angles_deg[l].size());
    if (r >= config.n_channels) {
      // Clutter spans the whole space; only the general form can hold it.
      params.covariance = GeneralCovariance{covs};
      return params;
    }
    c.clutter.push_back(covs[l].shifted(-n2));
    c.ranks.push_back(r);
  }
  params.covariance = std::move(c);
  return params;
}

}  // namespace

LabeledSnapshotSet generate(const ScenarioConfig& config) {
  Rng rng = Rng::derive(config.seed, "scenario", 0);
  return generate(config, rng);
}

LabeledSnapshotSet generate(const ScenarioConfig& config, Rng& rng) {
  const auto covs = class_covariances(config);
  const int K = config.total_bins();
  CMatrix data(config.n_channels, K);
  std::vector<int> labels;
  labels.reserve(K);
  Index offset = 0;
  for (int l = 0; l < config.num_classes(); ++l) {
    const int kl = config.class_sizes[l];
    Rng class_rng = rng.split("class", static_cast<std::uint64_t>(l));
    data.middleCols(offset, kl) = sample_complex_gaussian(covs[l], kl, class_rng).data();
    labels.insert(labels.end(), kl, l + 1);
    offset += kl;
  }
  return {SnapshotSet(std::move(data)), std::move(labels), true_params_of(config, covs)};
}

}  // namespace clutter
