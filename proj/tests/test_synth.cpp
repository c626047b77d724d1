#include <cmath>
#include <set>

#include "doctest.h"
#include "test_util.hpp"
#include "wg/synth.hpp"

using namespace wg;

TEST_SUITE("synth") {

TEST_CASE("bimodal mixture moments") {
  const auto x = gaussian_mixture_1d(1, 100000);
  double mean = 0.0;
  long above = 0;
  for (double v : x) {
    mean += v;
    above += v > -4.0;
  }
  mean /= x.size();
  CHECK(std::abs(mean + 4.5) <= 0.05);
  CHECK(std::abs(above / 1e5 - 0.5) <= 0.01);
  CHECK(gaussian_mixture_1d(1, 1000) == gaussian_mixture_1d(1, 1000));
  CHECK(gaussian_mixture_1d(1, 1000) != gaussian_mixture_1d(2, 1000));
}

TEST_CASE("unperturbed labels follow the relevant feature") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    JaggedBoundaryConfig cfg;
    cfg.n = 400;
    cfg.seed = seed;
    const auto task = jagged_boundary(cfg);
    REQUIRE(task.labels == task.clean_labels);
    for (Index i = 0; i < cfg.n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const int c = task.cluster[k];
      REQUIRE(task.ground_truth_feature[k] == c);
      const double centered = c == 0 ? task.points(i, 0) + cfg.cluster_offset : task.points(i, 1);
      REQUIRE(task.labels[k] == (centered > 0 ? 1 : 0));
    }
    const Matrix gt = ground_truth_one_hot(task);
    CHECK((gt.rowwise().sum().array() == 1.0).all());
  }
}

TEST_CASE("huge flood radius leaves a single label") {
  JaggedBoundaryConfig cfg;
  cfg.n = 200;
  cfg.perturbation_scale = 1e6;
  const auto task = jagged_boundary(cfg);
  CHECK(std::set<int>(task.labels.begin(), task.labels.end()).size() == 1);
}

TEST_CASE("flipped fraction grows with scale") {
  const double eps = 0.25;
  std::vector<double> flipped;
  for (double scale : {0.0, eps, 2 * eps, 4 * eps}) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      JaggedBoundaryConfig cfg;
      cfg.n = 400;
      cfg.perturbation_scale = scale;
      cfg.seed = seed;
      const auto task = jagged_boundary(cfg);
      long diff = 0;
      for (std::size_t i = 0; i < task.labels.size(); ++i) diff += task.labels[i] != task.clean_labels[i];
      total += static_cast<double>(diff) / cfg.n;
    }
    flipped.push_back(total / 20);
  }
  CHECK(flipped[0] == 0.0);
  for (std::size_t i = 1; i < flipped.size(); ++i) CHECK(flipped[i] > flipped[i - 1]);
}

TEST_CASE("flood terminates and only copies existing labels") {
  Rng rng(5);
  std::uniform_real_distribution<double> r(0.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 2 + trial * 3;
    const Matrix pts = test::gaussian_matrix(rng, n, 2);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (auto& l : labels) l = static_cast<int>(rng() % 3);
    const auto out = flood_labels(pts, labels, r(rng), static_cast<std::uint64_t>(trial));
    REQUIRE(out.size() == labels.size());
    const std::set<int> before(labels.begin(), labels.end());
    for (int l : out) REQUIRE(before.count(l) == 1);
  }
}

TEST_CASE("transforms") {
  Rng rng(9);
  const ExplanationSet x(ExplanationKind::attribution(3), test::gaussian_matrix(rng, 40, 3));
  const auto back = apply_transform(apply_transform(x, Rotate{0.8, 0, 2}), Rotate{-0.8, 0, 2});
  CHECK((back.data() - x.data()).cwiseAbs().maxCoeff() <= 1e-12);

  Vector v(3);
  v << 1.0, -2.0, 0.5;
  const auto moved = apply_transform(x, Translate{v});
  const auto halved = apply_transform(x, Scale{0.5});
  for (Index i = 0; i < x.size(); ++i)
    for (Index j = 0; j < x.size(); ++j) {
      const double d = (x.data().row(i) - x.data().row(j)).norm();
      REQUIRE((moved.data().row(i) - moved.data().row(j)).norm() == doctest::Approx(d).epsilon(1e-12));
      REQUIRE((halved.data().row(i) - halved.data().row(j)).norm() == 0.5 * d);
    }

  const auto flipped = apply_transform(x, Reflect{1});
  CHECK(flipped.data().col(1) == -x.data().col(1));
  const auto perm = apply_transform(x, PermuteFeatures{{2, 0, 1}});
  CHECK(perm.data().col(0) == x.data().col(2));
  CHECK_THROWS_AS(apply_transform(x, PermuteFeatures{{0, 0, 1}}), ConfigError);
  CHECK_THROWS_AS(apply_transform(ExplanationSet(ExplanationKind::selection(2), Matrix::Ones(2, 2)), Scale{2.0}),
                  ConfigError);
}

}  // TEST_SUITE
