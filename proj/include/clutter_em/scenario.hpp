#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "clutter_em/mixture.hpp"
#include "clutter_em/numerics.hpp"
#include "clutter_em/rng.hpp"

namespace clutter {

enum class ScenarioModel {
  ScaledAR1,         ///< M_l = sigma2_l * AR(1) Toeplitz
  PatchesPlusNoise,  ///< M_l = sigma2_l * sum_i v(theta_i) v(theta_i)^H + sigma2_n * I
};

std::string_view to_string(ScenarioModel model);
ScenarioModel scenario_model_from_string(std::string_view name);

/// Generative description of a synthetic multi-class experiment.
struct ScenarioConfig {
  int n_channels = 16;
  std::vector<int> class_sizes;
  ScenarioModel model_kind = ScenarioModel::ScaledAR1;
  double rho = 0.9;                                ///< ScaledAR1 only
  std::vector<double> clutter_powers_db;           ///< one per class
  double noise_power_db = 0.0;                     ///< PatchesPlusNoise only
  std::vector<std::vector<double>> angles_deg;     ///< PatchesPlusNoise only, one set per class
  std::uint64_t seed = 0;

  int num_classes() const { return static_cast<int>(class_sizes.size()); }
  int total_bins() const;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Snapshots with ground truth. Labels are 1-based and laid out in contiguous
/// blocks ordered class 1..L.
struct LabeledSnapshotSet {
  SnapshotSet snapshots;
  std::vector<int> true_labels;
  MixtureParams true_params;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Toeplitz matrix with entries rho^|i-j|.
HermitianMatrix covar_ar1(int n, double rho);

/// Uniform half-wavelength linear array response, unit norm.
CVector steering_vector(int n, double theta_deg);

HermitianMatrix covar_patches(int n, std::span<const double> angles_deg, double sigma_c2, double sigma_n2);

/// Per-class covariances of a validated config (linear powers).
std::vector<HermitianMatrix> class_covariances(const ScenarioConfig& config);

/// Uses the substream (config.seed, "scenario", 0).
LabeledSnapshotSet generate(const ScenarioConfig& config);
LabeledSnapshotSet generate(const ScenarioConfig& config, Rng& rng);

}  // namespace clutter
