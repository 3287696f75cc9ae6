#pragma once

#include <string_view>
#include <variant>
#include <vector>

#include "clutter_em/numerics.hpp"

namespace clutter {

/// The three covariance structures a mixture class can take.
enum class CovarianceModel {
  General,       ///< one unconstrained Hermitian PD matrix per class
  ScaledCommon,  ///< sigma2_l * M with M shared across classes
  LowRankNoise,  ///< sigma2_n * I + R_l with rank(R_l) <= r_l
};

std::string_view to_string(CovarianceModel model);
/// Throws ConfigError on an unknown name.
CovarianceModel covariance_model_from_string(std::string_view name);

struct GeneralCovariance {
  std::vector<HermitianMatrix> classes;
};

/// Common structure with trace(structure) == N after every M-step.
struct ScaledCommonCovariance {
  HermitianMatrix structure;
  RVector powers;
};

struct LowRankNoiseCovariance {
  double noise_power = 1.0;
  std::vector<HermitianMatrix> clutter;
  std::vector<int> ranks;
};

using CovarianceParams = std::variant<GeneralCovariance, ScaledCommonCovariance, LowRankNoiseCovariance>;

/// Class priors plus one of the three covariance parameterizations.
struct MixtureParams {
  RVector priors;
  CovarianceParams covariance;

  int num_classes() const { return static_cast<int>(priors.size()); }
  Index dim() const;
  CovarianceModel model() const;

  /// Effective per-class covariance M_l.
  HermitianMatrix class_covariance(int l) const;
  std::vector<HermitianMatrix> class_covariances() const;

  /// Checks the simplex, PD/PSD and rank constraints; throws StructuralError.
  void validate() const;
};

/// K x L posterior table q_k(l).
class Responsibilities {
 public:
  Responsibilities() = default;
  /// Validates that entries lie in [0,1] and rows sum to 1 within 1e-9.
  explicit Responsibilities(RMatrix table);

  /// Hard 0/1 responsibilities from 1-based labels.
  static Responsibilities from_labels(const std::vector<int>& labels, int num_classes);

  Index n_bins() const noexcept { return table_.rows(); }
  int num_classes() const noexcept { return static_cast<int>(table_.cols()); }
  const RMatrix& table() const noexcept { return table_; }
  double operator()(Index k, int l) const { return table_(k, l); }

  /// Sum_k q_k(l) for every class.
  RVector class_weights() const { return table_.colwise().sum().transpose(); }

 private:
  RMatrix table_;
};

}  // namespace clutter
