#include "clutter_em/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "clutter_em/error.hpp"

namespace clutter {

namespace {

constexpr double kCollapseFraction = 1e-8;
constexpr double kLogDecreaseTolerance = 1e-6;

void check_dims(const SnapshotSet& z, const Responsibilities& q) {
  if (q.n_bins() != z.n_bins()) {
    throw StructuralError(fmt::format("responsibilities cover {} bins but there are {} snapshots", q.n_bins(), z.n_bins()));
  }
}

RVector checked_class_weights(const Responsibilities& q) {
  RVector w = q.class_weights();
  const double floor = kCollapseFraction * static_cast<double>(q.n_bins());
  for (int l = 0; l < q.num_classes(); ++l) {
    if (!(w(l) >= floor)) {
      throw ClassCollapseError(l + 1, 0, fmt::format("class {} collapsed (total responsibility {:.3e})", l + 1, w(l)));
    }
  }
  return w;
}

/// Z diag(c) Z^H
CMatrix weighted_scatter(const CMatrix& z, const RVector& c) {
  return z * c.cast<Complex>().asDiagonal() * z.adjoint();
}

/// Adds ridge_eps * trace / N * I when the condition number exceeds 1 / ridge_eps.
HermitianMatrix regularize(const CMatrix& m, double ridge_eps, bool& ridged) {
  HermitianMatrix h(m, 1e-8);
  const auto eig = hermitian_eig(h);
  const double top = eig.eigenvalues(0);
  const double bottom = eig.eigenvalues(eig.eigenvalues.size() - 1);
  ridged = !(bottom > 0.0) || top / bottom > 1.0 / ridge_eps;
  if (ridged) {
    const double tr = std::max(h.trace(), std::numeric_limits<double>::min());
    return h.shifted(ridge_eps * tr / static_cast<double>(h.dim()));
  }
  return h;
}

}  // namespace

double MosCriterion::penalty_factor(Index n_bins, Index n_channels) const {
  switch (rule) {
    case MosRule::AIC: return 2.0;
    case MosRule::GIC: return 1.0 + a;
    case MosRule::BIC: return std::log(2.0 * static_cast<double>(n_bins) * static_cast<double>(n_channels));
  }
  return 2.0;
}

void FitConfig::validate() const {
  if (num_classes < 1) throw ConfigError("L", "must be at least 1");
  if (h_max < 1) throw ConfigError("h_max", "must be at least 1");
  if (t_max < 1) throw ConfigError("t_max", "must be at least 1");
  if (mos_rule.rule == MosRule::GIC && !(mos_rule.a >= 1.0)) throw ConfigError("mos_rule.a", "GIC requires a >= 1");
  if (!(ll_tol >= 0.0)) throw ConfigError("ll_tol", "must be nonnegative");
  if (!(ridge_eps > 0.0 && ridge_eps < 1.0)) throw ConfigError("ridge_eps", "must lie in (0, 1)");
  if (ranks) {
    if (model_kind != CovarianceModel::LowRankNoise) throw ConfigError("ranks", "only valid for model_kind LowRankNoise");
    if (static_cast<int>(ranks->size()) != num_classes) {
      throw ConfigError("ranks", fmt::format("has {} entries but L = {}", ranks->size(), num_classes));
    }
    for (std::size_t l = 0; l < ranks->size(); ++l) {
      if ((*ranks)[l] < 1) throw ConfigError(fmt::format("ranks[{}]", l), "must be at least 1");
    }
  }
}

RMatrix log_joint_densities(const SnapshotSet& z, const MixtureParams& params) {
  const int L = params.num_classes();
  if (params.dim() != z.n_channels()) {
    throw StructuralError(fmt::format("parameters have dimension {} but snapshots have {} channels", params.dim(), z.n_channels()));
  }
  const double n_log_pi = static_cast<double>(z.n_channels()) * std::log(std::numbers::pi);
  RMatrix out(z.n_bins(), L);
  for (int l = 0; l < L; ++l) {
    const double p = params.priors(l);
    if (!(p > 0.0)) {
      out.col(l).setConstant(-std::numeric_limits<double>::infinity());
      continue;
    }
    const CholeskyFactor chol(params.class_covariance(l));
    out.col(l) = (std::log(p) - n_log_pi - chol.log_det()) - chol.quad_forms(z.data()).array();
  }
  return out;
}

double log_likelihood(const SnapshotSet& z, const MixtureParams& params) {
  const RMatrix terms = log_joint_densities(z, params);
  double total = 0.0;
  for (Index k = 0; k < terms.rows(); ++k) {
    const double shift = terms.row(k).maxCoeff();
    total += shift + std::log((terms.row(k).array() - shift).exp().sum());
  }
  return total;
}

Responsibilities e_step(const SnapshotSet& z, const MixtureParams& params) {
  RMatrix terms = log_joint_densities(z, params);
  for (Index k = 0; k < terms.rows(); ++k) {
    const double shift = terms.row(k).maxCoeff();
    if (!std::isfinite(shift)) throw NumericalError(fmt::format("no class has positive density at bin {}", k + 1));
    terms.row(k) = (terms.row(k).array() - shift).exp();
    terms.row(k) /= terms.row(k).sum();
  }
  return Responsibilities(std::move(terms));
}

RVector update_priors(const Responsibilities& q) {
  RVector p = q.class_weights() / static_cast<double>(q.n_bins());
  return p / p.sum();
}

GeneralStep m_step_general(const SnapshotSet& z, const Responsibilities& q, double ridge_eps) {
  check_dims(z, q);
  if (z.n_bins() < z.n_channels()) {
    throw StructuralError(fmt::format("general M-step needs K >= N (K = {}, N = {})", z.n_bins(), z.n_channels()));
  }
  const RVector w = checked_class_weights(q);
  GeneralStep out;
  for (int l = 0; l < q.num_classes(); ++l) {
    const CMatrix m = weighted_scatter(z.data(), q.table().col(l)) / w(l);
    bool ridged = false;
    out.covariances.push_back(regularize(m, ridge_eps, ridged));
    out.ridged.push_back(ridged);
  }
  return out;
}

ScaledStep m_step_scaled(const SnapshotSet& z, const Responsibilities& q, const HermitianMatrix& m_prev,
                         int t_max, double ridge_eps) {
  check_dims(z, q);
  const Index n = z.n_channels();
  const Index K = z.n_bins();
  if (K < n) throw StructuralError(fmt::format("scaled M-step needs K >= N (K = {}, N = {})", K, n));
  if (m_prev.dim() != n) throw StructuralError("previous structure has the wrong dimension");
  if (t_max < 1) throw StructuralError("t_max must be at least 1");
  const RVector w = checked_class_weights(q);
  const int L = q.num_classes();

  ScaledStep out{RVector(L), m_prev, false};
  for (int t = 0; t < t_max; ++t) {
    const RVector quad = CholeskyFactor(out.structure).quad_forms(z.data());
    for (int l = 0; l < L; ++l) {
      out.powers(l) = q.table().col(l).dot(quad) / (static_cast<double>(n) * w(l));
      if (!(out.powers(l) > 0.0)) throw NumericalError(fmt::format("power estimate of class {} is not positive", l + 1));
    }
    // Per-snapshot weight sum_l q_k(l) / sigma2_l.
    const RVector c = q.table() * out.powers.cwiseInverse();
    bool ridged = false;
    out.structure = regularize(weighted_scatter(z.data(), c) / static_cast<double>(K), ridge_eps, ridged);
    out.ridged = out.ridged || ridged;
  }

  const double gauge = out.structure.trace() / static_cast<double>(n);
  out.structure = out.structure.scaled(1.0 / gauge);
  out.powers *= gauge;
  return out;
}

LowRankStep lowrank_from_decompositions(std::vector<EigenDecomposition> decompositions, RVector class_weights,
                                        std::span<const int> ranks, Index n_bins) {
  const int L = static_cast<int>(decompositions.size());
  if (static_cast<int>(ranks.size()) != L || class_weights.size() != L) {
    throw StructuralError("one rank and one weight per class required");
  }
  const Index n = decompositions.front().eigenvalues.size();
  double tail = 0.0;
  double dof = 0.0;
  double total_trace = 0.0;
  for (int l = 0; l < L; ++l) {
    if (ranks[l] < 1 || ranks[l] > n - 1) {
      throw StructuralError(fmt::format("rank of class {} must lie in [1, {}], got {}", l + 1, n - 1, ranks[l]));
    }
    const auto& g = decompositions[l].eigenvalues;
    tail += g.tail(n - ranks[l]).sum();
    dof += class_weights(l) * static_cast<double>(n - ranks[l]);
    total_trace += g.sum();
  }

  LowRankStep out;
  out.noise_power = tail / dof;
  if (!(out.noise_power > 0.0)) {
    out.noise_power = 1e-12 * total_trace / (static_cast<double>(n_bins) * static_cast<double>(n));
    out.noise_floored = true;
    if (!(out.noise_power > 0.0)) throw NumericalError("weighted scatter matrices are all zero");
  }

  for (int l = 0; l < L; ++l) {
    const auto& d = decompositions[l];
    RVector lambda = RVector::Zero(n);
    for (int m = 0; m < ranks[l]; ++m) {
      lambda(m) = std::max(d.eigenvalues(m) / class_weights(l) - out.noise_power, 0.0);
    }
    const CMatrix r = d.eigenvectors * lambda.cast<Complex>().asDiagonal() * d.eigenvectors.adjoint();
    out.clutter.emplace_back(r, 1e-8);
  }
  out.decompositions = std::move(decompositions);
  out.class_weights = std::move(class_weights);
  return out;
}

LowRankStep m_step_lowrank(const SnapshotSet& z, const Responsibilities& q, std::span<const int> ranks) {
  check_dims(z, q);
  RVector w = checked_class_weights(q);
  std::vector<EigenDecomposition> decompositions;
  for (int l = 0; l < q.num_classes(); ++l) {
    decompositions.push_back(hermitian_eig(HermitianMatrix(weighted_scatter(z.data(), q.table().col(l)), 1e-8)));
  }
  return lowrank_from_decompositions(std::move(decompositions), std::move(w), ranks, z.n_bins());
}

std::vector<int> estimate_ranks(std::span<const EigenDecomposition> decompositions, const Responsibilities& q,
                                double noise_power, const MosCriterion& rule, Index n_bins, Index n_channels) {
  if (!(noise_power > 0.0)) throw StructuralError("noise power must be positive for rank estimation");
  if (static_cast<int>(decompositions.size()) != q.num_classes()) {
    throw StructuralError("one decomposition per class required");
  }
  const double kp = rule.penalty_factor(n_bins, n_channels);
  const RVector w = q.class_weights();
  const int n = static_cast<int>(n_channels);
  const double log_noise = std::log(noise_power);

  std::vector<int> ranks;
  for (std::size_t l = 0; l < decompositions.size(); ++l) {
    const RVector& g = decompositions[l].eigenvalues;
    const double wl = w(static_cast<Index>(l));
    // Eigenvalues that are numerically zero would send log() to -inf.
    const double ratio_floor = 1e-12 * noise_power;
    int best_rank = 1;
    double best = std::numeric_limits<double>::infinity();
    double head_log = 0.0;
    for (int r = 1; r <= n - 1; ++r) {
      head_log += std::log(std::max(g(r - 1) / wl, ratio_floor));
      const double tail = g.tail(n - r).sum();
      const double value = 2.0 * wl * head_log + 2.0 * (n - r) * log_noise * wl + 2.0 * r * wl +
                           2.0 / noise_power * tail + (r * (2.0 * n - r) + 1.0) * kp;
      if (value < best) {
        best = value;
        best_rank = r;
      }
    }
    ranks.push_back(best_rank);
  }
  return ranks;
}

std::vector<int> classify(const Responsibilities& q) {
  std::vector<int> labels(static_cast<std::size_t>(q.n_bins()));
  for (Index k = 0; k < q.n_bins(); ++k) {
    int best = 0;
    for (int l = 1; l < q.num_classes(); ++l) {
      if (q(k, l) > q(k, best)) best = l;
    }
    labels[static_cast<std::size_t>(k)] = best + 1;
  }
  return labels;
}

namespace {

std::vector<int> initial_ranks(const FitConfig& config, const MixtureParams& init) {
  if (config.ranks) return *config.ranks;
  return std::get<LowRankNoiseCovariance>(init.covariance).ranks;
}

MixtureParams lowrank_params(RVector priors, const LowRankStep& step, std::vector<int> ranks) {
  return {std::move(priors), LowRankNoiseCovariance{step.noise_power, step.clutter, std::move(ranks)}};
}

}  // namespace

FitResult run_em(const SnapshotSet& z, const FitConfig& config, const MixtureParams& init) {
  config.validate();
  if (init.model() != config.model_kind) {
    throw StructuralError(fmt::format("initial parameters use model {} but the fit requests {}", to_string(init.model()),
                                      to_string(config.model_kind)));
  }
  if (init.num_classes() != config.num_classes) {
    throw StructuralError(fmt::format("initial parameters have {} classes, expected {}", init.num_classes(), config.num_classes));
  }
  if (init.dim() != z.n_channels()) throw StructuralError("initial parameters do not match the snapshot dimension");
  const Index n = z.n_channels();
  if (config.ranks) {
    for (int r : *config.ranks) {
      if (r > n - 1) throw ConfigError("ranks", fmt::format("rank {} exceeds N - 1 = {}", r, n - 1));
    }
  }

  FitResult result;
  result.params = init;
  result.ll_trace.push_back(log_likelihood(z, init));
  std::vector<int> ranks;
  if (config.model_kind == CovarianceModel::LowRankNoise) ranks = initial_ranks(config, init);

  for (int h = 1; h <= config.h_max; ++h) {
    try {
      const Responsibilities q = e_step(z, result.params);
      RVector priors = update_priors(q);

      switch (config.model_kind) {
        case CovarianceModel::General: {
          auto step = m_step_general(z, q, config.ridge_eps);
          result.ridge_events += static_cast<int>(std::count(step.ridged.begin(), step.ridged.end(), true));
          result.params = {std::move(priors), GeneralCovariance{std::move(step.covariances)}};
          break;
        }
        case CovarianceModel::ScaledCommon: {
          const auto& prev = std::get<ScaledCommonCovariance>(result.params.covariance);
          auto step = m_step_scaled(z, q, prev.structure, config.t_max, config.ridge_eps);
          result.ridge_events += step.ridged ? 1 : 0;
          result.params = {std::move(priors), ScaledCommonCovariance{std::move(step.structure), std::move(step.powers)}};
          break;
        }
        case CovarianceModel::LowRankNoise: {
          auto step = m_step_lowrank(z, q, ranks);
          if (!config.ranks) {
            ranks = estimate_ranks(step.decompositions, q, step.noise_power, config.mos_rule, z.n_bins(), n);
            step = lowrank_from_decompositions(std::move(step.decompositions), std::move(step.class_weights), ranks,
                                               z.n_bins());
            result.rank_trace.push_back(ranks);
          }
          result.noise_floor_events += step.noise_floored ? 1 : 0;
          result.params = lowrank_params(std::move(priors), step, ranks);
          break;
        }
      }
    } catch (const ClassCollapseError& e) {
      throw ClassCollapseError(e.class_index(), h, fmt::format("iteration {}: {}", h, e.what()));
    }

    const double ll = log_likelihood(z, result.params);
    const double prev = result.ll_trace.back();
    if (ll < prev - kLogDecreaseTolerance * std::abs(prev)) {
      ++result.ll_decreases;
      spdlog::debug("EM iteration {}: log-likelihood decreased from {:.10g} to {:.10g}", h, prev, ll);
    }
    result.ll_trace.push_back(ll);
    result.iterations_run = h;
    if (config.ll_tol > 0.0 && std::abs(ll - prev) < config.ll_tol * std::abs(prev)) break;
  }

  result.responsibilities = e_step(z, result.params);
  result.labels = classify(result.responsibilities);
  return result;
}

}  // namespace clutter
