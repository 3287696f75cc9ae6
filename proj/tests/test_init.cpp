#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "clutter_em/error.hpp"
#include "clutter_em/init.hpp"
#include "clutter_em/scenario.hpp"

using namespace clutter;

namespace {

LabeledSnapshotSet patch_data() {
  ScenarioConfig c;
  c.n_channels = 8;
  c.class_sizes = {20, 20, 20};
  c.model_kind = ScenarioModel::PatchesPlusNoise;
  c.clutter_powers_db = {10, 20, 30};
  c.angles_deg.assign(3, {-3.0, 3.0});
  c.seed = 8;
  return generate(c);
}

}  // namespace

TEST_CASE("chunk means") {
  const std::vector<double> g{1, 2, 3, 4, 5, 6};
  const RVector m = chunk_means(g, 3);
  CHECK(m(0) == doctest::Approx(1.5));
  CHECK(m(1) == doctest::Approx(3.5));
  CHECK(m(2) == doctest::Approx(5.5));

  const std::vector<double> odd{1, 2, 3, 4, 5, 6, 7};
  const RVector r = chunk_means(odd, 3);
  CHECK(r(0) == doctest::Approx(1.5));
  CHECK(r(1) == doctest::Approx(3.5));
  CHECK(r(2) == doctest::Approx(6.0));

  CHECK_THROWS_AS(chunk_means(std::vector<double>{1.0}, 2), StructuralError);
}

TEST_CASE("random structure has unit trace and is positive definite") {
  Rng rng(1);
  const auto s = random_structure(6, 30, rng);
  CHECK(s.trace() == doctest::Approx(1.0));
  CHECK(hermitian_eig(s).eigenvalues.minCoeff() > 0.0);
}

TEST_CASE("init_params for every model") {
  const auto data = patch_data();
  for (auto model : {CovarianceModel::General, CovarianceModel::ScaledCommon, CovarianceModel::LowRankNoise}) {
    Rng rng(4);
    const auto p = init_params(data.snapshots, 3, model, rng);
    p.validate();
    CHECK(p.model() == model);
    CHECK(p.priors.isApprox(RVector::Constant(3, 1.0 / 3)));
    // Class powers ascend with the index.
    const auto covs = p.class_covariances();
    for (int l = 0; l + 1 < 3; ++l) CHECK(covs[l].trace() <= covs[l + 1].trace());
  }
}

TEST_CASE("init_params General and ScaledCommon describe the same covariances") {
  const auto data = patch_data();
  Rng a(9), b(9);
  const auto g = init_params(data.snapshots, 3, CovarianceModel::General, a);
  const auto s = init_params(data.snapshots, 3, CovarianceModel::ScaledCommon, b);
  CHECK(std::get<ScaledCommonCovariance>(s.covariance).structure.trace() == doctest::Approx(8.0));
  for (int l = 0; l < 3; ++l) {
    const CMatrix d = g.class_covariance(l).matrix() - s.class_covariance(l).matrix();
    CHECK(d.norm() < 1e-9 * g.class_covariance(l).matrix().norm());
  }
}

TEST_CASE("init_params LowRankNoise matches the weakest class exactly") {
  const auto data = patch_data();
  Rng a(2), b(2);
  const auto g = init_params(data.snapshots, 3, CovarianceModel::General, a);
  const auto lr = init_params(data.snapshots, 3, CovarianceModel::LowRankNoise, b);
  const CMatrix d = g.class_covariance(0).matrix() - lr.class_covariance(0).matrix();
  CHECK(d.norm() < 1e-9 * g.class_covariance(0).matrix().norm());
  const auto& c = std::get<LowRankNoiseCovariance>(lr.covariance);
  CHECK(c.ranks == std::vector<int>{7, 7, 7});
}

TEST_CASE("init_params determinism and errors") {
  const auto data = patch_data();
  Rng a(5), b(5);
  const auto p = init_params(data.snapshots, 3, CovarianceModel::General, a);
  const auto q = init_params(data.snapshots, 3, CovarianceModel::General, b);
  for (int l = 0; l < 3; ++l) CHECK(p.class_covariance(l).matrix() == q.class_covariance(l).matrix());

  Rng rng(1);
  const SnapshotSet narrow(circular_normal_matrix(8, 5, rng));
  CHECK_THROWS_AS(init_params(narrow, 2, CovarianceModel::General, rng), StructuralError);
  CHECK_THROWS_AS(init_params(data.snapshots, 3, CovarianceModel::LowRankNoise, rng, std::vector<int>{1, 8, 1}),
                  StructuralError);
}

TEST_CASE("resolve_init") {
  const auto data = patch_data();
  FitConfig cfg;
  InitRecipe recipe;
  recipe.seed = 12;
  const auto a = resolve_init(recipe, data.snapshots, cfg);
  const auto b = resolve_init(recipe, data.snapshots, cfg);
  CHECK(a.class_covariance(1).matrix() == b.class_covariance(1).matrix());

  const auto user = resolve_init(InitRecipe::user_supplied(a), data.snapshots, cfg);
  CHECK(user.class_covariance(2).matrix() == a.class_covariance(2).matrix());

  InitRecipe broken;
  broken.kind = InitRecipe::Kind::UserSupplied;
  CHECK_THROWS_AS(resolve_init(broken, data.snapshots, cfg), ConfigError);
}
