#include <cmath>
#include <filesystem>
#include <unistd.h>

#include "doctest.h"
#include "oracles.hpp"
#include "wg/explanation_file.hpp"
#include "wg/studies.hpp"

using namespace wg;

TEST_SUITE("studies") {

TEST_CASE("mixture quantiles agree with a dense-grid table") {
  const auto table = test::mixture_quantiles_on_grid(test::kBimodal, 1000);
  for (int i = 0; i < 1000; i += 37) {
    const double u = (i + 0.5) / 1000;
    CHECK(mixture_quantile(kStudyMixture, u) == doctest::Approx(table[static_cast<std::size_t>(i)]).epsilon(1e-4));
  }
  CHECK(mixture_mean(kStudyMixture) == doctest::Approx(-4.5));
}

TEST_CASE("population distance agrees with the grid oracle") {
  for (double p : {1.0, 2.0}) {
    const double oracle = test::centered_mixture_vs_uniform(test::kBimodal, 30.0, p);
    CHECK(mixture_vs_uniform_wasserstein(kStudyMixture, 30.0, p) == doctest::Approx(oracle).epsilon(1e-3));
  }
  // A centered uniform against itself.
  const std::vector<MixtureComponent> narrow{{1.0, 0.0, 1e-9}};
  CHECK(mixture_vs_uniform_wasserstein(narrow, 30.0, 2.0) == doctest::Approx(30.0 / std::sqrt(3.0)).epsilon(1e-4));
}

TEST_CASE("mixture convergence curve decays") {
  const ConvergenceCurve curve = mixture_convergence_curve(4, {50, 200, 800, 3200}, 10);
  CHECK(curve.slope < 0.0);
  CHECK(curve.deviation.back() < curve.deviation.front());
}

TEST_CASE("unknown study names are rejected") {
  CHECK_THROWS_AS(run_study("figure9", 0), ConfigError);
  CHECK(study_names().size() == 4);
}

TEST_CASE("atomic writes create parents and replace contents") {
  const auto root = std::filesystem::temp_directory_path() / ("wg_atomic_" + std::to_string(::getpid()));
  const std::string path = (root / "a" / "b.txt").string();
  write_file_atomic(path, "one");
  write_file_atomic(path, "two");
  CHECK(read_text_file(path) == "two");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(root / "a")) ++entries;
  CHECK(entries == 1);
  std::filesystem::remove_all(root);
}

}  // TEST_SUITE
