#include <array>
#include <cmath>
#include <map>

#include "doctest.h"
#include "test_util.hpp"
#include "wg/baseline.hpp"

using namespace wg;

TEST_SUITE("baseline") {

TEST_CASE("radius k is the largest row norm") {
  Matrix a(1, 2), b(1, 2);
  a << 3, 4;
  b << 0, 1;
  std::vector<ExplanationSet> sets{ExplanationSet(ExplanationKind::attribution(2), a),
                                   ExplanationSet(ExplanationKind::attribution(2), b)};
  CHECK(estimate_radius_k(sets) == 5.0);

  std::vector<ExplanationSet> zero{ExplanationSet(ExplanationKind::attribution(2), Matrix::Zero(1, 2))};
  CHECK_THROWS_WITH_AS(estimate_radius_k(zero), doctest::Contains("degenerate radius"), ConfigError);

  Rng rng(3);
  const Matrix g = test::gaussian_matrix(rng, 50, 4);
  double scan = 0.0;
  for (Index i = 0; i < g.rows(); ++i) {
    double sq = 0.0;
    for (int j = 0; j < 4; ++j) sq += g(i, j) * g(i, j);
    scan = std::max(scan, std::sqrt(sq));
  }
  std::vector<ExplanationSet> one{ExplanationSet(ExplanationKind::attribution(4), g)};
  CHECK(estimate_radius_k(one) == doctest::Approx(scan).epsilon(1e-14));
}

TEST_CASE("baseline validation") {
  CHECK_THROWS_AS(check_baseline(BaselineSpec::ball(2, 0.0), ExplanationKind::attribution(2)), ConfigError);
  CHECK_THROWS_AS(check_baseline(BaselineSpec::hypercube(2), ExplanationKind::attribution(2)), ConfigError);
  CHECK_THROWS_AS(check_baseline(BaselineSpec::permutations(3), ExplanationKind::ranking(4)), ConfigError);
  CHECK_NOTHROW(check_baseline(BaselineSpec::permutations(3), ExplanationKind::ranking(3)));
  CHECK_THROWS_AS(sample_baseline(BaselineSpec::ball(2, 0.0), 10), ConfigError);
}

TEST_CASE("unit disk mean radius is 2/3") {
  const ExplanationSet u = sample_baseline(BaselineSpec::ball(2, 1.0, 17), 100000);
  double sum = 0.0, max_norm = 0.0;
  for (Index i = 0; i < u.size(); ++i) {
    const double r = u.data().row(i).norm();
    sum += r;
    max_norm = std::max(max_norm, r);
  }
  CHECK(sum / u.size() == doctest::Approx(2.0 / 3.0).epsilon(0.01 / (2.0 / 3.0)));
  CHECK(max_norm <= 1.0);
}

TEST_CASE("ball in higher dimension stays inside radius and is isotropic") {
  const ExplanationSet u = sample_baseline(BaselineSpec::ball(7, 2.5, 4), 20000);
  CHECK(u.data().rowwise().norm().maxCoeff() <= 2.5);
  // E r^2 = k^2 s / (s + 2) for the uniform s-ball.
  CHECK(u.data().rowwise().squaredNorm().mean() == doctest::Approx(6.25 * 7.0 / 9.0).epsilon(0.02));
  CHECK(u.data().colwise().mean().cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("hypercube bits are fair coins") {
  const ExplanationSet u = sample_baseline(BaselineSpec::hypercube(3, 9), 100000);
  for (int j = 0; j < 3; ++j) CHECK(std::abs(u.data().col(j).mean() - 0.5) < 0.01);
  CHECK(((u.data().array() == 0.0) || (u.data().array() == 1.0)).all());
}

TEST_CASE("permutations of three are uniform") {
  const ExplanationSet u = sample_baseline(BaselineSpec::permutations(3, 21), 60000);
  std::map<std::array<int, 3>, int> counts;
  for (Index i = 0; i < u.size(); ++i)
    ++counts[{static_cast<int>(u.data()(i, 0)), static_cast<int>(u.data()(i, 1)),
              static_cast<int>(u.data()(i, 2))}];
  CHECK(counts.size() == 6);
  for (const auto& [perm, c] : counts) CHECK(std::abs(c / 60000.0 - 1.0 / 6.0) < 0.02);
}

TEST_CASE("seeding") {
  const auto a = sample_baseline(BaselineSpec::ball(3, 1.0, 5), 100);
  const auto b = sample_baseline(BaselineSpec::ball(3, 1.0, 5), 100);
  const auto c = sample_baseline(BaselineSpec::ball(3, 1.0, 6), 100);
  CHECK(a.data() == b.data());
  CHECK(a.data() != c.data());
}

TEST_CASE("centering") {
  Matrix m(2, 2);
  m << 1, 1, 3, 3;
  Matrix expect(2, 2);
  expect << -1, -1, 1, 1;
  CHECK(center(ExplanationSet(ExplanationKind::attribution(2), m)).data() == expect);

  Matrix single(1, 1);
  single << 5;
  CHECK(center(ExplanationSet(ExplanationKind::attribution(1), single)).data()(0, 0) == 0.0);

  Rng rng(11);
  const ExplanationSet sel(ExplanationKind::selection(4), test::random_bits(rng, 30, 4));
  CHECK(center(sel).data() == sel.data());
  const ExplanationSet rank(ExplanationKind::ranking(4), test::random_permutations(rng, 30, 4));
  CHECK(center(rank).data() == rank.data());
}

TEST_CASE("centering is idempotent and translation invariant") {
  Rng rng(19);
  std::normal_distribution<double> g(0.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int s = 1 + trial % 5;
    const ExplanationSet x(ExplanationKind::attribution(s), test::gaussian_matrix(rng, 3 + trial % 40, s, 2.0, 1.0));
    const ExplanationSet once = center(x);
    REQUIRE(center(once).data() == once.data());
    Matrix shifted = x.data();
    Eigen::RowVectorXd v(s);
    for (int j = 0; j < s; ++j) v(j) = g(rng);
    shifted.rowwise() += v;
    const ExplanationSet moved = center(ExplanationSet(ExplanationKind::attribution(s), shifted));
    REQUIRE((moved.data() - once.data()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

}  // TEST_SUITE
