#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"
#include "wg/globalness.hpp"
#include "wg/synth.hpp"

using namespace wg;

namespace {

ExplanationSet one_dim(const std::vector<double>& v) {
  Matrix m(static_cast<Index>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Index>(i), 0) = v[i];
  return ExplanationSet(ExplanationKind::attribution(1), std::move(m));
}

}  // namespace

TEST_SUITE("globalness") {

TEST_CASE("baseline draws score near zero") {
  const SpaceConfig space = SpaceConfig::attribution(2, 1.0);
  const ExplanationSet u = sample_baseline(BaselineSpec::ball(2, 1.0, 1234), 2000);
  const auto rep = globalness(u, space, SolverConfig::sliced(500), 77);
  CHECK(rep.normalized_wg <= 0.05);
}

TEST_CASE("copies of one vector reach the normalizer") {
  Matrix m(300, 3);
  m.rowwise() = Eigen::RowVector3d(2.0, -1.0, 0.5);
  const ExplanationSet set(ExplanationKind::attribution(3), m);
  const SpaceConfig space = SpaceConfig::attribution(3, 1.5);
  for (const SolverConfig& cfg : {SolverConfig::sliced(200), SolverConfig::sinkhorn(), SolverConfig::exact()}) {
    const auto rep = globalness(set, space, cfg, 5);
    CHECK(std::abs(rep.raw_wg - rep.dirac_normalizer) / rep.dirac_normalizer <= 0.03);
    CHECK(rep.normalized_wg == doctest::Approx(1.0).epsilon(0.03));
  }
  Rng rng(2);
  const ExplanationSet sel(ExplanationKind::selection(5), test::random_bits(rng, 1, 5).replicate(400, 1));
  CHECK(globalness(sel, SpaceConfig::selection(5), SolverConfig::sinkhorn(), 3).normalized_wg ==
        doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("bimodal mixture against the quantile oracle") {
  const double oracle = test::centered_mixture_vs_uniform(test::kBimodal, 30.0, 2.0);
  const ExplanationSet x = one_dim(gaussian_mixture_1d(91, 500));
  const SpaceConfig space = SpaceConfig::attribution(1, 30.0);
  const double raw = wg_raw(x, space, SolverConfig::exact_1d(), 13).distance;
  CHECK(std::abs(raw - oracle) / oracle <= 0.05);

  const auto rep = globalness(x, space, SolverConfig::exact_1d(), 13);
  CHECK(rep.normalized_wg > 0.0);
  CHECK(rep.normalized_wg < 1.0);
  // Ordering: the population value sits between the baseline (0) and the Dirac (h / sqrt 3).
  CHECK(oracle / (30.0 / std::sqrt(3.0)) == doctest::Approx(rep.normalized_wg).epsilon(0.05));
}

TEST_CASE("normalizer closed forms") {
  const Index n = 100000;
  // E r^2 = 1/2 on the unit disk; a Dirac couples every baseline point to the origin.
  const double ball = dirac_normalizer(SpaceConfig::attribution(2, 1.0), SolverConfig::sinkhorn(), n, 3).distance;
  CHECK(std::abs(ball - std::sqrt(0.5)) <= 0.02);
  // Expected Hamming distance from a vertex to a uniform vertex is s/2.
  const double cube = dirac_normalizer(SpaceConfig::selection(3), SolverConfig::sinkhorn(), n, 3).distance;
  CHECK(std::abs(cube - 1.5) <= 0.05);
  // Kendall distances from the identity over S_3 are {0,1,1,2,2,3}.
  const double perms = dirac_normalizer(SpaceConfig::ranking(3), SolverConfig::sinkhorn(), n, 3).distance;
  CHECK(std::abs(perms - 1.5) <= 0.05);
  // Unit interval [-h, h]: E x^2 = h^2 / 3.
  const double line = dirac_normalizer(SpaceConfig::attribution(1, 30.0), SolverConfig::exact_1d(), 20000, 3).distance;
  CHECK(line == doctest::Approx(30.0 / std::sqrt(3.0)).epsilon(0.02));
}

TEST_CASE("normalized score orders dirac, mixture and baseline") {
  const SpaceConfig space = SpaceConfig::attribution(1, 30.0);
  const auto baseline = sample_baseline(BaselineSpec::ball(1, 30.0, 55), 20000);
  const auto mix = one_dim(gaussian_mixture_1d(56, 20000));
  const auto dirac = dirac_set(space, 20000);
  const double b = globalness(baseline, space, SolverConfig::exact_1d(), 9).normalized_wg;
  const double m = globalness(mix, space, SolverConfig::exact_1d(), 9).normalized_wg;
  const double d = globalness(dirac, space, SolverConfig::exact_1d(), 9).normalized_wg;
  CHECK(b <= 0.05);
  CHECK(b < m);
  CHECK(m < d);
  CHECK(d == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("reports are deterministic per seed") {
  Rng rng(4);
  const ExplanationSet x(ExplanationKind::attribution(3), test::gaussian_matrix(rng, 200, 3));
  const SpaceConfig space = SpaceConfig::attribution(3, 4.0);
  const auto a = globalness(x, space, SolverConfig::sliced(100), 21);
  const auto b = globalness(x, space, SolverConfig::sliced(100), 21);
  const auto c = globalness(x, space, SolverConfig::sliced(100), 22);
  CHECK(a.raw_wg == b.raw_wg);
  CHECK(a.dirac_normalizer == b.dirac_normalizer);
  CHECK(a.raw_wg != c.raw_wg);
}

TEST_CASE("mismatched inputs are rejected") {
  Rng rng(6);
  const ExplanationSet x(ExplanationKind::attribution(3), test::gaussian_matrix(rng, 20, 3));
  CHECK_THROWS_AS(globalness(x, SpaceConfig::attribution(2, 1.0), SolverConfig::sliced(), 0), ConfigError);
  CHECK_THROWS_AS(globalness(x, SpaceConfig::selection(3), SolverConfig::sinkhorn(), 0), ConfigError);
  CHECK_THROWS_AS(globalness(x, SpaceConfig::attribution(3, 0.0), SolverConfig::sliced(), 0), ConfigError);
}

TEST_CASE("dirac sampler deviation stays within normalizer noise") {
  const SpaceConfig space = SpaceConfig::attribution(2, 1.0);
  const SetSampler dirac = [&](Index n, std::uint64_t) { return dirac_set(space, n); };
  const std::vector<Index> ns{50, 200, 800, 3200};
  const auto curve = convergence_curve(dirac, space, SolverConfig::sinkhorn(), ns, 10, 8, std::sqrt(0.5));
  // r^2 is U(0,1) on the disk, so sqrt(mean r^2) has delta-method sd sqrt(1/12) / (2 sqrt(1/2) sqrt N).
  for (const auto& pt : curve) CHECK(pt.mean_abs_deviation <= 3.0 * std::sqrt(1.0 / 12.0) / std::sqrt(2.0 * pt.n));
}

TEST_CASE("self-sampled ball deviation decays") {
  const SpaceConfig space = SpaceConfig::attribution(2, 1.0);
  const SetSampler self = [](Index n, std::uint64_t seed) { return sample_baseline(BaselineSpec::ball(2, 1.0, seed), n); };
  const std::vector<Index> ns{50, 200, 800, 3200};
  const auto curve = convergence_curve(self, space, SolverConfig::sliced(200), ns, 8, 10, 0.0);
  CHECK(loglog_slope(curve) < 0.0);
  CHECK(curve.back().mean_abs_deviation < curve.front().mean_abs_deviation);
}

}  // TEST_SUITE
