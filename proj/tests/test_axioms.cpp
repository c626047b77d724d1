#include <cmath>

#include "doctest.h"
#include "test_util.hpp"
#include "wg/axioms.hpp"
#include "wg/ot_solvers.hpp"

using namespace wg;

namespace {

ExplanationSet attr(Matrix m) {
  const int s = static_cast<int>(m.cols());
  return ExplanationSet(ExplanationKind::attribution(s), std::move(m));
}

Matrix stack(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() + b.rows(), a.cols());
  out << a, b;
  return out;
}

}  // namespace

TEST_SUITE("axioms") {

TEST_CASE("p-th power of the distance is convex in the mixture weight") {
  // Half-half mixtures are exact with equal-weight atoms: stack P and Q against R stacked twice.
  Rng rng(1);
  const DistanceSpec spec{Metric::Euclidean, 2.0};
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 4 + trial % 5;
    const Matrix p = test::gaussian_matrix(rng, n, 2, 1.0, -1.0);
    const Matrix q = test::gaussian_matrix(rng, n, 2, 2.0, 1.5);
    const Matrix r = test::gaussian_matrix(rng, n, 2, 1.0, 0.0);
    const double wp = std::pow(wasserstein_exact(attr(p), attr(r), spec).distance, 2.0);
    const double wq = std::pow(wasserstein_exact(attr(q), attr(r), spec).distance, 2.0);
    const double wm = std::pow(wasserstein_exact(attr(stack(p, q)), attr(stack(r, r)), spec).distance, 2.0);
    REQUIRE(wm <= 0.5 * wp + 0.5 * wq + 1e-9);
  }
}

TEST_CASE("the distance itself is not convex for p = 2") {
  // W_2(1/2 delta_1 + 1/2 delta_3, delta_0) = sqrt(5) exceeds (1 + 3) / 2.
  Matrix mix(2, 1), zero = Matrix::Zero(2, 1);
  mix << 1.0, 3.0;
  const DistanceSpec spec{Metric::Euclidean, 2.0};
  const double w = wasserstein_exact(attr(mix), attr(zero), spec).distance;
  CHECK(w == doctest::Approx(std::sqrt(5.0)));
  CHECK(w > 2.0);
  // For p = 1 the chord bound holds with equality here.
  CHECK(wasserstein_exact(attr(mix), attr(zero), {Metric::Euclidean, 1.0}).distance == doctest::Approx(2.0));
}

TEST_CASE("individual checks pass") {
  AxiomOptions opt;
  opt.seed = 5;
  opt.fuzz_cases = 30;
  CHECK(check_non_negativity(opt).passed);
  CHECK(check_fully_local(opt).passed);
  CHECK(check_convexity(opt).passed);
}

TEST_CASE("zero invariance tolerance fails the invariance check") {
  AxiomOptions opt;
  opt.seed = 2;
  opt.invariance_tolerance = 0.0;
  const AxiomCheck c = check_selective_invariance(opt);
  CHECK_FALSE(c.passed);
}

TEST_CASE("substitute measures fail the invariance check") {
  for (const char* m : {"entropy", "tv", "kl"}) {
    AxiomOptions opt;
    opt.seed = 2;
    opt.measure = m;
    CHECK_FALSE(check_selective_invariance(opt).passed);
  }
  AxiomOptions bad;
  bad.measure = "cosine";
  CHECK_THROWS_AS(check_selective_invariance(bad), ConfigError);
}

TEST_CASE("junit and json rendering") {
  AxiomSuite suite;
  suite.checks.push_back({"P1", "non-negativity", true, 0.1, 0.0, "ok"});
  suite.checks.push_back({"P4", "fully-local <measure>", false, 0.2, 0.05, "a & b"});
  const std::string xml = to_junit_xml(suite);
  CHECK(xml.find("tests=\"2\"") != std::string::npos);
  CHECK(xml.find("failures=\"1\"") != std::string::npos);
  CHECK(xml.find("&lt;measure&gt;") != std::string::npos);
  CHECK(xml.find("a &amp; b") != std::string::npos);
  CHECK(to_json(suite).find("\"P4\"") != std::string::npos);
}

}  // TEST_SUITE
