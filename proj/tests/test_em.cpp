#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "clutter_em/em.hpp"
#include "clutter_em/error.hpp"
#include "clutter_em/init.hpp"
#include "clutter_em/scenario.hpp"
#include "oracles.hpp"

using namespace clutter;

namespace {

const double kPi = std::numbers::pi;

SnapshotSet scalar_snapshots(std::vector<Complex> values) {
  CMatrix z(1, static_cast<Index>(values.size()));
  for (std::size_t k = 0; k < values.size(); ++k) z(0, static_cast<Index>(k)) = values[k];
  return SnapshotSet(z);
}

MixtureParams scalar_general(std::vector<double> priors, std::vector<double> vars) {
  MixtureParams p;
  p.priors = Eigen::Map<RVector>(priors.data(), static_cast<Index>(priors.size()));
  GeneralCovariance c;
  for (double v : vars) c.classes.push_back(HermitianMatrix::from_real(RMatrix::Constant(1, 1, v)));
  p.covariance = c;
  return p;
}

ScenarioConfig ar1_scenario(std::vector<int> sizes, std::vector<double> powers, std::uint64_t seed) {
  ScenarioConfig c;
  c.n_channels = 16;
  c.class_sizes = std::move(sizes);
  c.model_kind = ScenarioModel::ScaledAR1;
  c.rho = 0.9;
  c.clutter_powers_db = std::move(powers);
  c.seed = seed;
  return c;
}

ScenarioConfig patch_scenario(std::vector<int> sizes, std::vector<double> powers, std::uint64_t seed) {
  ScenarioConfig c;
  c.n_channels = 16;
  c.class_sizes = std::move(sizes);
  c.model_kind = ScenarioModel::PatchesPlusNoise;
  c.clutter_powers_db = std::move(powers);
  c.noise_power_db = 0.0;
  c.angles_deg.assign(c.class_sizes.size(), {-5.6, -2.8, 0.0, 2.8, 5.6});
  c.seed = seed;
  return c;
}

FitResult fit_default(const LabeledSnapshotSet& data, FitConfig cfg, std::uint64_t init_seed) {
  Rng rng = Rng::derive(init_seed, "init", 0);
  return run_em(data.snapshots, cfg, init_params(data.snapshots, cfg.num_classes, cfg.model_kind, rng, cfg.ranks));
}

}  // namespace

TEST_CASE("log_likelihood scalar examples") {
  CHECK(log_likelihood(scalar_snapshots({0}), scalar_general({1}, {1})) == doctest::Approx(-std::log(kPi)));
  CHECK(log_likelihood(scalar_snapshots({0}), scalar_general({1}, {1})) == doctest::Approx(-1.144730).epsilon(1e-6));
  CHECK(log_likelihood(scalar_snapshots({0, 0, 0}), scalar_general({1}, {1})) == doctest::Approx(-3 * std::log(kPi)));
  const double two = log_likelihood(scalar_snapshots({0}), scalar_general({0.5, 0.5}, {1, 2}));
  CHECK(two == doctest::Approx(std::log(0.75 / kPi)));
  CHECK(two == doctest::Approx(-1.432412).epsilon(1e-6));
}

TEST_CASE("log_likelihood survives large power spreads") {
  // 1e-6 and 1e6 variances with a snapshot far in the tail of the narrow class.
  const auto z = scalar_snapshots({Complex(3e2, 0)});
  const double ll = log_likelihood(z, scalar_general({0.5, 0.5}, {1e-6, 1e6}));
  CHECK(std::isfinite(ll));
  CHECK(ll == doctest::Approx(std::log(0.5) - std::log(kPi * 1e6) - 9e4 / 1e6));
}

TEST_CASE("e_step examples") {
  const auto one = e_step(scalar_snapshots({1, 2, 3}), scalar_general({1}, {1}));
  for (Index k = 0; k < 3; ++k) CHECK(one(k, 0) == 1.0);

  const auto q = e_step(scalar_snapshots({0}), scalar_general({0.5, 0.5}, {1, 2}));
  CHECK(q(0, 0) == doctest::Approx(2.0 / 3.0));

  const auto same = e_step(scalar_snapshots({1, Complex(0, 2)}), scalar_general({0.5, 0.5}, {3, 3}));
  for (Index k = 0; k < 2; ++k) {
    CHECK(same(k, 0) == 0.5);
    CHECK(same(k, 1) == 0.5);
  }
}

TEST_CASE("e_step equals Bayes' rule on scalar instances") {
  Rng rng(4);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int L = 2 + trial % 3;
    std::vector<double> p(L), v(L);
    for (int l = 0; l < L; ++l) {
      p[l] = u(rng.engine());
      v[l] = u(rng.engine());
    }
    const double s = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& x : p) x /= s;
    std::vector<Complex> zs;
    for (int k = 0; k < 5; ++k) zs.push_back(rng.circular_normal() * 2.0);
    const auto q = e_step(scalar_snapshots(zs), scalar_general(p, v));
    for (int k = 0; k < 5; ++k) {
      std::vector<double> joint(L);
      for (int l = 0; l < L; ++l) joint[l] = p[l] / (kPi * v[l]) * std::exp(-std::norm(zs[k]) / v[l]);
      const double total = std::accumulate(joint.begin(), joint.end(), 0.0);
      double row = 0.0;
      for (int l = 0; l < L; ++l) {
        CHECK(std::abs(q(k, l) - joint[l] / total) < 1e-12);
        row += q(k, l);
      }
      CHECK(std::abs(row - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("update_priors examples") {
  RMatrix t(3, 2);
  t << 0.25, 0.75, 0.25, 0.75, 0.25, 0.75;
  CHECK(update_priors(Responsibilities(t)).isApprox(RVector((RVector(2) << 0.25, 0.75).finished())));
  CHECK(update_priors(Responsibilities::from_labels({1, 2}, 2)).isApprox(RVector::Constant(2, 0.5)));
  const RVector p = update_priors(Responsibilities::from_labels({1, 1, 2}, 2));
  CHECK(p(0) == doctest::Approx(2.0 / 3));
  CHECK(p(1) == doctest::Approx(1.0 / 3));
}

TEST_CASE("classify examples") {
  RMatrix t(3, 3);
  t << 0.2, 0.5, 0.3, 0.5, 0.5, 0.0, 0, 0, 1;
  CHECK(classify(Responsibilities(t)) == std::vector<int>{2, 1, 3});
  CHECK(classify(Responsibilities::from_labels({3, 1, 2, 2}, 3)) == std::vector<int>{3, 1, 2, 2});
}

TEST_CASE("m_step_general with uniform and hard weights") {
  Rng rng(2);
  const SnapshotSet z(circular_normal_matrix(3, 12, rng));
  const auto all = m_step_general(z, Responsibilities(RMatrix::Ones(12, 1)));
  CHECK((all.covariances[0].matrix() - z.data() * z.data().adjoint() / 12.0).norm() < 1e-12);

  std::vector<int> labels(12, 1);
  for (int k = 6; k < 12; ++k) labels[k] = 2;
  const auto hard = m_step_general(z, Responsibilities::from_labels(labels, 2));
  const CMatrix a = z.data().leftCols(6), b = z.data().rightCols(6);
  CHECK((hard.covariances[0].matrix() - a * a.adjoint() / 6.0).norm() < 1e-12);
  CHECK((hard.covariances[1].matrix() - b * b.adjoint() / 6.0).norm() < 1e-12);
}

TEST_CASE("m_step_general reaches the numerical maximum of the weighted objective") {
  Rng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix z = circular_normal_matrix(2, 6, rng);
    const Responsibilities q(oracle::random_responsibilities(6, 2, rng));
    const auto step = m_step_general(SnapshotSet(z), q);
    const RVector q1 = q.table().col(0);
    const double closed = oracle::weighted_gaussian_objective(z, q1, step.covariances[0].matrix());
    const double numeric = oracle::maximize_weighted_gaussian(z, q1);
    CHECK(std::abs(closed - numeric) < 1e-3);
    CHECK(closed >= numeric - 1e-9);
  }
}

TEST_CASE("m_step_general satisfies the stationarity condition") {
  Rng rng(32);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix z = circular_normal_matrix(4, 20, rng);
    const Responsibilities q(oracle::random_responsibilities(20, 3, rng));
    const auto step = m_step_general(SnapshotSet(z), q);
    for (int l = 0; l < 3; ++l) {
      const RVector ql = q.table().col(l);
      const CMatrix s = z * ql.cast<Complex>().asDiagonal() * z.adjoint();
      const CMatrix inv = step.covariances[l].matrix().inverse();
      const CMatrix grad = -ql.sum() * inv + inv * s * inv;
      CHECK(grad.norm() < 1e-8 * s.norm());
    }
  }
}

TEST_CASE("m_step_general ridges a singular scatter and reports collapse") {
  CMatrix z = CMatrix::Zero(2, 3);
  z(0, 0) = 1;
  z(0, 1) = 2;
  z(0, 2) = 1;
  const auto step = m_step_general(SnapshotSet(z), Responsibilities(RMatrix::Ones(3, 1)));
  CHECK(step.ridged[0]);
  CHECK(hermitian_eig(step.covariances[0]).eigenvalues.minCoeff() > 0.0);

  Rng rng(1);
  const SnapshotSet w(circular_normal_matrix(2, 4, rng));
  try {
    m_step_general(w, Responsibilities::from_labels({1, 1, 1, 1}, 2));
    FAIL("expected ClassCollapseError");
  } catch (const ClassCollapseError& e) {
    CHECK(e.class_index() == 2);
  }
}

TEST_CASE("m_step_scaled examples") {
  const auto z = scalar_snapshots({1, Complex(0, std::sqrt(3.0))});
  const auto step = m_step_scaled(z, Responsibilities(RMatrix::Ones(2, 1)), HermitianMatrix::identity(1), 1);
  CHECK(step.powers(0) == doctest::Approx(2.0));
  CHECK(step.structure.matrix()(0, 0).real() == doctest::Approx(1.0));
}

TEST_CASE("m_step_scaled recovers the structure direction") {
  Rng rng(77);
  const auto truth = covar_ar1(6, 0.7);
  const auto z = sample_complex_gaussian(truth.scaled(5.0), 1000, rng);
  const auto step = m_step_scaled(z, Responsibilities(RMatrix::Ones(1000, 1)), HermitianMatrix::identity(6), 10);
  const CMatrix target = 6.0 * truth.matrix() / truth.trace();
  CHECK((step.structure.matrix() - target).norm() / truth.matrix().norm() < 0.1);
  CHECK(step.structure.trace() == doctest::Approx(6.0));
}

TEST_CASE("m_step_scaled is homogeneous in the data scale") {
  Rng rng(78);
  const SnapshotSet z(circular_normal_matrix(4, 30, rng));
  const Responsibilities q(oracle::random_responsibilities(30, 2, rng));
  const auto a = m_step_scaled(z, q, HermitianMatrix::identity(4), 10);
  const double g = 3.7;
  const auto b = m_step_scaled(SnapshotSet(z.data() * g), q, HermitianMatrix::identity(4), 10);
  CHECK((b.powers - a.powers * g * g).norm() < 1e-9 * b.powers.norm());
  CHECK((b.structure.matrix() - a.structure.matrix()).norm() < 1e-9);
}

TEST_CASE("m_step_lowrank hand example and clamp") {
  CMatrix z = CMatrix::Zero(2, 4);
  z(0, 0) = std::sqrt(12.0);
  z(1, 1) = 2.0;
  const std::vector<int> r1{1};
  const auto step = m_step_lowrank(SnapshotSet(z), Responsibilities(RMatrix::Ones(4, 1)), r1);
  CHECK(step.noise_power == doctest::Approx(1.0));
  const auto e = hermitian_eig(step.clutter[0]);
  CHECK(e.eigenvalues(0) == doctest::Approx(2.0));
  CHECK(std::abs(e.eigenvalues(1)) < 1e-12);

  // Two classes: the weak one is fully clamped by the pooled noise estimate.
  CMatrix y = CMatrix::Zero(2, 4);
  y(0, 0) = 1.0;
  y(1, 1) = 1.0;
  y(0, 2) = 10.0;
  y(1, 3) = 10.0;
  const std::vector<int> r2{1, 1};
  const auto clamp = m_step_lowrank(SnapshotSet(y), Responsibilities::from_labels({1, 1, 2, 2}, 2), r2);
  CHECK(clamp.noise_power == doctest::Approx(101.0 / 4.0));
  CHECK(clamp.clutter[0].matrix().norm() == 0.0);
}

TEST_CASE("m_step_lowrank floors a zero noise estimate") {
  CMatrix z = CMatrix::Zero(2, 3);
  z(0, 0) = 1;
  z(0, 1) = 2;
  z(0, 2) = -1;
  const std::vector<int> r{1};
  const auto step = m_step_lowrank(SnapshotSet(z), Responsibilities(RMatrix::Ones(3, 1)), r);
  CHECK(step.noise_floored);
  CHECK(step.noise_power > 0.0);
}

TEST_CASE("m_step_lowrank is consistent on patch data") {
  const auto cfg = patch_scenario({200, 200}, {20, 30}, 5);
  const auto data = generate(cfg);
  const std::vector<int> r{5, 5};
  const auto step = m_step_lowrank(data.snapshots, Responsibilities::from_labels(data.true_labels, 2), r);
  const auto covs = class_covariances(cfg);
  for (int l = 0; l < 2; ++l) {
    const CMatrix est = step.clutter[l].shifted(step.noise_power).matrix();
    CHECK((est - covs[l].matrix()).norm() / covs[l].matrix().norm() < 0.2);
  }
}

TEST_CASE("m_step_lowrank reaches the numerical maximum for rank one") {
  Rng rng(41);
  for (int trial = 0; trial < 3; ++trial) {
    const CMatrix z = circular_normal_matrix(2, 6, rng);
    const Responsibilities q(oracle::random_responsibilities(6, 2, rng));
    const std::vector<int> r{1, 1};
    const auto step = m_step_lowrank(SnapshotSet(z), q, r);
    std::vector<CMatrix> scatter;
    double closed = 0.0;
    for (int l = 0; l < 2; ++l) {
      const RVector ql = q.table().col(l);
      scatter.push_back(z * ql.cast<Complex>().asDiagonal() * z.adjoint());
      closed += oracle::weighted_gaussian_objective(z, ql, step.clutter[l].shifted(step.noise_power).matrix());
    }
    const double numeric = oracle::maximize_rank_one(scatter, q.class_weights());
    CHECK(std::abs(closed - numeric) < 1e-2);
  }
}

TEST_CASE("estimate_ranks examples") {
  auto decomp = [](std::vector<double> g) {
    EigenDecomposition d;
    d.eigenvalues = Eigen::Map<RVector>(g.data(), static_cast<Index>(g.size()));
    d.eigenvectors = CMatrix::Identity(d.eigenvalues.size(), d.eigenvalues.size());
    return d;
  };
  const Responsibilities q(RMatrix::Ones(1, 1));
  const std::vector<EigenDecomposition> strong{decomp({100, 1, 1})};
  CHECK(estimate_ranks(strong, q, 1.0, {MosRule::AIC, 2}, 1, 3) == std::vector<int>{1});

  const std::vector<EigenDecomposition> flat{decomp({1, 1, 1, 1})};
  for (auto rule : {MosRule::AIC, MosRule::GIC, MosRule::BIC}) {
    CHECK(estimate_ranks(flat, q, 1.0, {rule, 2}, 1, 4) == std::vector<int>{1});
  }

  // Larger penalty never selects a larger rank.
  Rng rng(6);
  std::uniform_real_distribution<double> u(0.0, 6.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> g(6);
    for (auto& x : g) x = std::exp(u(rng.engine()));
    std::sort(g.rbegin(), g.rend());
    const std::vector<EigenDecomposition> d{decomp(g)};
    const auto a = estimate_ranks(d, q, 1.0, {MosRule::GIC, 1.0}, 10, 6);
    const auto b = estimate_ranks(d, q, 1.0, {MosRule::GIC, 3.0}, 10, 6);
    CHECK(b[0] <= a[0]);
  }
}

TEST_CASE("estimate_ranks equals joint enumeration") {
  Rng rng(8);
  std::uniform_real_distribution<double> u(-2.0, 4.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 3;
    const int L = 1 + trial % 2;
    const Responsibilities q(oracle::random_responsibilities(12, L, rng));
    const RVector w = q.class_weights();
    std::vector<EigenDecomposition> d(L);
    std::vector<RVector> gammas;
    for (int l = 0; l < L; ++l) {
      RVector g(n);
      for (int m = 0; m < n; ++m) g(m) = w(l) * std::exp(u(rng.engine()));
      std::sort(g.data(), g.data() + n, std::greater<>());
      d[l].eigenvalues = g;
      d[l].eigenvectors = CMatrix::Identity(n, n);
      gammas.push_back(g);
    }
    const double s2 = std::exp(u(rng.engine()) / 2);
    for (const MosCriterion rule : {MosCriterion{MosRule::AIC, 2}, MosCriterion{MosRule::GIC, 2}, MosCriterion{MosRule::BIC, 2}}) {
      const auto per_class = estimate_ranks(d, q, s2, rule, 12, n);
      const auto joint = oracle::joint_rank_search(gammas, w, s2, rule.penalty_factor(12, n));
      CHECK(per_class == joint);
    }
  }
}

TEST_CASE("run_em with one class") {
  for (auto model : {CovarianceModel::General, CovarianceModel::ScaledCommon, CovarianceModel::LowRankNoise}) {
    ScenarioConfig sc = ar1_scenario({40}, {10}, 3);
    const auto data = generate(sc);
    FitConfig cfg;
    cfg.model_kind = model;
    cfg.num_classes = 1;
    const auto res = fit_default(data, cfg, 1);
    CHECK(res.labels == std::vector<int>(40, 1));
    CHECK(res.ll_trace.size() == 11);
    if (model != CovarianceModel::LowRankNoise) {
      for (std::size_t h = 1; h < res.ll_trace.size(); ++h) {
        CHECK(res.ll_trace[h] >= res.ll_trace[h - 1] - 1e-9 * std::abs(res.ll_trace[h - 1]));
      }
    }
  }
}

TEST_CASE("run_em separates well-spaced powers with the scaled model") {
  const auto data = generate(ar1_scenario({32, 32, 32}, {20, 35, 50}, 2024));
  FitConfig cfg;
  cfg.model_kind = CovarianceModel::ScaledCommon;
  const auto res = fit_default(data, cfg, 7);
  CHECK(res.labels == data.true_labels);
  CHECK(res.iterations_run == 10);
}

TEST_CASE("run_em is monotone and converges within five iterations") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto data = generate(ar1_scenario({24, 24, 48}, {20, 30, 40}, seed));
    for (auto model : {CovarianceModel::General, CovarianceModel::ScaledCommon}) {
      FitConfig cfg;
      cfg.model_kind = model;
      const auto res = fit_default(data, cfg, seed + 100);
      for (std::size_t h = 1; h < res.ll_trace.size(); ++h) {
        CHECK(res.ll_trace[h] >= res.ll_trace[h - 1] - 1e-9 * std::abs(res.ll_trace[h - 1]));
      }
      CHECK(std::abs(res.ll_trace[5] - res.ll_trace[10]) / std::abs(res.ll_trace[10]) < 1e-3);
    }
  }
}

TEST_CASE("run_em low-rank fits respect the rank constraints") {
  const auto data = generate(patch_scenario({32, 32, 32}, {20, 30, 40}, 9));
  FitConfig cfg;
  cfg.model_kind = CovarianceModel::LowRankNoise;
  const auto res = fit_default(data, cfg, 1);
  res.params.validate();
  CHECK(res.rank_trace.size() == 10);
  const auto& p = std::get<LowRankNoiseCovariance>(res.params.covariance);
  CHECK(p.ranks == res.rank_trace.back());

  cfg.ranks = std::vector<int>{5, 5, 5};
  const auto known = fit_default(data, cfg, 1);
  known.params.validate();
  CHECK(known.rank_trace.empty());
  CHECK(std::get<LowRankNoiseCovariance>(known.params.covariance).ranks == std::vector<int>{5, 5, 5});
}

TEST_CASE("run_em early stop") {
  const auto data = generate(ar1_scenario({32, 32, 32}, {20, 35, 50}, 1));
  FitConfig cfg;
  cfg.model_kind = CovarianceModel::ScaledCommon;
  cfg.ll_tol = 1e-6;
  cfg.h_max = 50;
  const auto res = fit_default(data, cfg, 1);
  CHECK(res.iterations_run < 50);
  CHECK(res.ll_trace.size() == static_cast<std::size_t>(res.iterations_run) + 1);
}

TEST_CASE("run_em reports the iteration of a class collapse") {
  // Two identical tiny clusters and a third class that starts with negligible power.
  const auto data = generate(ar1_scenario({20, 20}, {20, 20}, 1));
  MixtureParams init;
  init.priors = RVector::Constant(3, 1.0 / 3);
  GeneralCovariance c;
  c.classes = {covar_ar1(16, 0.9).scaled(100), covar_ar1(16, 0.9).scaled(100), HermitianMatrix::identity(16).scaled(1e-6)};
  init.covariance = c;
  FitConfig cfg;
  cfg.num_classes = 3;
  try {
    run_em(data.snapshots, cfg, init);
    FAIL("expected ClassCollapseError");
  } catch (const ClassCollapseError& e) {
    CHECK(e.class_index() == 3);
    CHECK(e.iteration() == 1);
  }
}

TEST_CASE("log_likelihood and e_step are gauge invariant") {
  const auto data = generate(ar1_scenario({10, 10, 10}, {0, 5, 10}, 4));
  Rng rng(5);
  const auto p = init_params(data.snapshots, 3, CovarianceModel::ScaledCommon, rng);
  const auto& s = std::get<ScaledCommonCovariance>(p.covariance);
  for (double c : {0.01, 3.0, 1e4}) {
    MixtureParams g{p.priors, ScaledCommonCovariance{s.structure.scaled(c), s.powers / c}};
    const double a = log_likelihood(data.snapshots, p), b = log_likelihood(data.snapshots, g);
    CHECK(std::abs(a - b) <= 1e-10 * std::abs(a));
    CHECK((e_step(data.snapshots, p).table() - e_step(data.snapshots, g).table()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("run_em is equivariant under class permutations") {
  const auto data = generate(ar1_scenario({24, 24, 48}, {20, 30, 40}, 12));
  Rng rng(3);
  const auto init = init_params(data.snapshots, 3, CovarianceModel::General, rng);
  const std::vector<int> perm{2, 0, 1};
  MixtureParams permuted;
  permuted.priors = RVector(3);
  GeneralCovariance pc;
  const auto& ic = std::get<GeneralCovariance>(init.covariance);
  for (int j = 0; j < 3; ++j) {
    permuted.priors(j) = init.priors(perm[j]);
    pc.classes.push_back(ic.classes[perm[j]]);
  }
  permuted.covariance = pc;
  FitConfig cfg;
  const auto a = run_em(data.snapshots, cfg, init);
  const auto b = run_em(data.snapshots, cfg, permuted);
  for (std::size_t k = 0; k < a.labels.size(); ++k) CHECK(a.labels[k] == perm[b.labels[k] - 1] + 1);
  CHECK(a.ll_trace.back() == doctest::Approx(b.ll_trace.back()).epsilon(1e-10));
}

TEST_CASE("responsibilities of a fit sum to K and parameters stay feasible") {
  for (auto model : {CovarianceModel::General, CovarianceModel::ScaledCommon, CovarianceModel::LowRankNoise}) {
    const auto data = generate(patch_scenario({30, 30, 30}, {20, 30, 40}, 21));
    FitConfig cfg;
    cfg.model_kind = model;
    const auto res = fit_default(data, cfg, 4);
    res.params.validate();
    const auto& t = res.responsibilities.table();
    CHECK(std::abs(t.sum() - 90.0) < 1e-9);
    CHECK((t.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(std::abs(res.params.priors.sum() - 1.0) < 1e-12);
    CHECK(res.params.priors.minCoeff() >= 0.0);
  }
}

TEST_CASE("fit config validation") {
  FitConfig cfg;
  cfg.h_max = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.mos_rule = {MosRule::GIC, 0.5};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.ranks = std::vector<int>{1, 1, 1};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.model_kind = CovarianceModel::LowRankNoise;
  CHECK_NOTHROW(cfg.validate());
  cfg.ranks = std::vector<int>{1, 1};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("penalty factors") {
  CHECK(MosCriterion{MosRule::AIC, 2}.penalty_factor(96, 16) == 2.0);
  CHECK(MosCriterion{MosRule::GIC, 2}.penalty_factor(96, 16) == 3.0);
  CHECK(MosCriterion{MosRule::BIC, 2}.penalty_factor(96, 16) == doctest::Approx(std::log(2.0 * 96 * 16)));
}
