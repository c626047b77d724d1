#include "wg/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "wg/random.hpp"

namespace wg {

SpaceKind BaselineSpec::space() const {
  if (std::holds_alternative<UniformBall>(shape)) return SpaceKind::Attribution;
  if (std::holds_alternative<UniformHypercube>(shape)) return SpaceKind::Selection;
  return SpaceKind::Ranking;
}

void check_baseline(const BaselineSpec& spec, const ExplanationKind& kind) {
  if (spec.dim < 1) throw ConfigError("baseline dimension must be >= 1");
  if (const auto* ball = std::get_if<UniformBall>(&spec.shape)) {
    if (!(ball->radius > 0) || !std::isfinite(ball->radius))
      throw ConfigError("degenerate radius: baseline ball radius k must be > 0");
  }
  if (spec.space() != kind.space)
    throw ConfigError("baseline does not match the " + std::string(to_string(kind.space)) +
                      " space");
  if (spec.dim != kind.dim) throw ConfigError("baseline dimension differs from explanation s");
}

double estimate_radius_k(std::span<const ExplanationSet> sets) {
  if (sets.empty()) throw ConfigError("radius estimation needs at least one explanation set");
  const int s = sets.front().dim();
  double k = 0.0;
  for (const auto& set : sets) {
    if (set.kind().space != SpaceKind::Attribution)
      throw ConfigError("radius estimation applies to attribution sets only");
    if (set.dim() != s) throw ConfigError("radius estimation needs sets of equal dimension");
    k = std::max(k, set.data().rowwise().norm().maxCoeff());
  }
  if (!(k > 0)) throw ConfigError("degenerate radius: every explanation is the zero vector");
  return k;
}

ExplanationSet sample_baseline(const BaselineSpec& spec, Index n) {
  if (n < 1) throw ConfigError("baseline sample count must be >= 1");
  if (spec.dim < 1) throw ConfigError("baseline dimension must be >= 1");
  Rng rng(spec.seed);
  const int s = spec.dim;
  Matrix out(n, s);

  if (const auto* ball = std::get_if<UniformBall>(&spec.shape)) {
    if (!(ball->radius > 0)) throw ConfigError("degenerate radius: baseline ball radius k must be > 0");
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif;
    for (Index i = 0; i < n; ++i) {
      double norm = 0.0;
      do {
        for (int j = 0; j < s; ++j) out(i, j) = normal(rng);
        norm = out.row(i).norm();
      } while (norm == 0.0);
      // Inverse CDF of the radius: P(r <= t) = (t/k)^s.
      const double r = ball->radius * std::pow(unif(rng), 1.0 / s);
      out.row(i) *= r / norm;
    }
    return ExplanationSet(ExplanationKind::attribution(s), std::move(out));
  }

  if (std::holds_alternative<UniformHypercube>(spec.shape)) {
    std::bernoulli_distribution coin(0.5);
    for (Index i = 0; i < n; ++i)
      for (int j = 0; j < s; ++j) out(i, j) = coin(rng) ? 1.0 : 0.0;
    return ExplanationSet(ExplanationKind::selection(s), std::move(out));
  }

  std::vector<int> perm(static_cast<std::size_t>(s));
  for (Index i = 0; i < n; ++i) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int j = 0; j < s; ++j) out(i, j) = perm[static_cast<std::size_t>(j)];
  }
  return ExplanationSet(ExplanationKind::ranking(s), std::move(out));
}

ExplanationSet center(const ExplanationSet& set) {
  if (set.kind().space != SpaceKind::Attribution) return set;
  const Eigen::RowVectorXd mean = set.data().colwise().mean();
  // Already centered up to rounding: return as is so centering is idempotent.
  const double scale = set.data().cwiseAbs().maxCoeff();
  if (mean.cwiseAbs().maxCoeff() <= 1024 * std::numeric_limits<double>::epsilon() * scale)
    return set;
  Matrix centered = set.data().rowwise() - mean;
  return ExplanationSet(set.kind(), std::move(centered));
}

}  // namespace wg
