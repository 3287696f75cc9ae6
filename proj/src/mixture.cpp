#include "clutter_em/mixture.hpp"

#include <cmath>
#include <string>

#include <fmt/format.h>

#include "clutter_em/error.hpp"

namespace clutter {

std::string_view to_string(CovarianceModel model) {
  switch (model) {
    case CovarianceModel::General: return "General";
    case CovarianceModel::ScaledCommon: return "ScaledCommon";
    case CovarianceModel::LowRankNoise: return "LowRankNoise";
  }
  return "?";
}

CovarianceModel covariance_model_from_string(std::string_view name) {
  if (name == "General") return CovarianceModel::General;
  if (name == "ScaledCommon") return CovarianceModel::ScaledCommon;
  if (name == "LowRankNoise") return CovarianceModel::LowRankNoise;
  throw ConfigError("", fmt::format("unknown covariance model '{}' (expected General, ScaledCommon or LowRankNoise)", name));
}

Index MixtureParams::dim() const {
  return std::visit(
      [](const auto& c) -> Index {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, GeneralCovariance>) {
          return c.classes.empty() ? 0 : c.classes.front().dim();
        } else if constexpr (std::is_same_v<T, ScaledCommonCovariance>) {
          return c.structure.dim();
        } else {
          return c.clutter.empty() ? 0 : c.clutter.front().dim();
        }
      },
      covariance);
}

CovarianceModel MixtureParams::model() const {
  switch (covariance.index()) {
    case 0: return CovarianceModel::General;
    case 1: return CovarianceModel::ScaledCommon;
    default: return CovarianceModel::LowRankNoise;
  }
}

HermitianMatrix MixtureParams::class_covariance(int l) const {
  return std::visit(
      [l](const auto& c) -> HermitianMatrix {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, GeneralCovariance>) {
          return c.classes.at(l);
        } else if constexpr (std::is_same_v<T, ScaledCommonCovariance>) {
          return c.structure.scaled(c.powers(l));
        } else {
          return c.clutter.at(l).shifted(c.noise_power);
        }
      },
      covariance);
}

std::vector<HermitianMatrix> MixtureParams::class_covariances() const {
  std::vector<HermitianMatrix> out;
  out.reserve(num_classes());
  for (int l = 0; l < num_classes(); ++l) out.push_back(class_covariance(l));
  return out;
}

namespace {

void require_pd(const HermitianMatrix& m, const std::string& what) {
  const auto eig = hermitian_eig(m);
  if (!(eig.eigenvalues(eig.eigenvalues.size() - 1) > 0.0)) {
    throw StructuralError(what + " is not positive definite");
  }
}

}  // namespace

void MixtureParams::validate() const {
  const int L = num_classes();
  if (L < 1) throw StructuralError("mixture needs at least one class");
  if ((priors.array() < 0.0).any() || !priors.allFinite()) {
    throw StructuralError("priors must be finite and nonnegative");
  }
  if (std::abs(priors.sum() - 1.0) > 1e-12 * L) {
    throw StructuralError(fmt::format("priors sum to {} instead of 1", priors.sum()));
  }
  const Index n = dim();
  if (n < 1) throw StructuralError("covariance dimension must be positive");

  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, GeneralCovariance>) {
          if (static_cast<int>(c.classes.size()) != L) throw StructuralError("one covariance per class required");
          for (int l = 0; l < L; ++l) {
            if (c.classes[l].dim() != n) throw StructuralError("class covariances differ in size");
            require_pd(c.classes[l], fmt::format("covariance of class {}", l + 1));
          }
        } else if constexpr (std::is_same_v<T, ScaledCommonCovariance>) {
          if (c.powers.size() != L) throw StructuralError("one power per class required");
          if (!(c.powers.array() > 0.0).all()) throw StructuralError("class powers must be positive");
          require_pd(c.structure, "common structure");
        } else {
          if (static_cast<int>(c.clutter.size()) != L || static_cast<int>(c.ranks.size()) != L) {
            throw StructuralError("one clutter matrix and rank per class required");
          }
          if (!(c.noise_power > 0.0)) throw StructuralError("noise power must be positive");
          for (int l = 0; l < L; ++l) {
            const auto& r = c.clutter[l];
            if (r.dim() != n) throw StructuralError("clutter matrices differ in size");
            if (c.ranks[l] < 1 || c.ranks[l] > n - 1) {
              throw StructuralError(fmt::format("rank of class {} must lie in [1, {}]", l + 1, n - 1));
            }
            const auto eig = hermitian_eig(r);
            const double tr = std::max(r.trace(), 0.0);
            const double floor = 1e-10 * std::max(tr, 1e-300);
            if (eig.eigenvalues(n - 1) < -1e-9 * std::max(tr, 1.0)) {
              throw StructuralError(fmt::format("clutter matrix of class {} is not PSD", l + 1));
            }
            const auto significant = (eig.eigenvalues.array() > floor).count();
            if (significant > c.ranks[l]) {
              throw StructuralError(fmt::format("clutter matrix of class {} has rank {} > {}", l + 1,
                                                significant, c.ranks[l]));
            }
          }
        }
      },
      covariance);
}

Responsibilities::Responsibilities(RMatrix table) : table_(std::move(table)) {
  if (table_.cols() < 1) throw StructuralError("responsibilities need at least one class");
  if (!table_.allFinite() || (table_.array() < 0.0).any() || (table_.array() > 1.0 + 1e-12).any()) {
    throw StructuralError("responsibilities must lie in [0, 1]");
  }
  for (Index k = 0; k < table_.rows(); ++k) {
    if (std::abs(table_.row(k).sum() - 1.0) > 1e-9) {
      throw StructuralError(fmt::format("responsibility row {} does not sum to 1", k + 1));
    }
  }
}

Responsibilities Responsibilities::from_labels(const std::vector<int>& labels, int num_classes) {
  RMatrix t = RMatrix::Zero(static_cast<Index>(labels.size()), num_classes);
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (labels[k] < 1 || labels[k] > num_classes) {
      throw StructuralError(fmt::format("label {} at bin {} outside 1..{}", labels[k], k + 1, num_classes));
    }
    t(static_cast<Index>(k), labels[k] - 1) = 1.0;
  }
  return Responsibilities(std::move(t));
}

}  // namespace clutter
