#include "wg/globalness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wg/random.hpp"

namespace wg {

SpaceConfig SpaceConfig::attribution(int s, double radius, double p) {
  return {ExplanationKind::attribution(s), {Metric::Euclidean, p}, BaselineSpec::ball(s, radius), true};
}

SpaceConfig SpaceConfig::selection(int s, double p) {
  return {ExplanationKind::selection(s), {Metric::Hamming, p}, BaselineSpec::hypercube(s), false};
}

SpaceConfig SpaceConfig::ranking(int s, double p) {
  return {ExplanationKind::ranking(s), {Metric::KendallTau, p}, BaselineSpec::permutations(s), false};
}

void SpaceConfig::validate() const {
  if (kind.dim < 1) throw ConfigError("explanation dimension s must be >= 1");
  check_pairing(kind, distance);
  check_baseline(baseline, kind);
}

namespace {

void check_set_matches(const ExplanationSet& set, const SpaceConfig& space) {
  if (!(set.kind() == space.kind))
    throw ConfigError("explanation set (" + std::string(to_string(set.kind().space)) + ", s=" +
                      std::to_string(set.dim()) + ") does not match the configured space (" +
                      std::string(to_string(space.kind.space)) + ", s=" +
                      std::to_string(space.kind.dim) + ")");
}

SolverConfig with_projection_seed(SolverConfig solver, std::uint64_t seed) {
  if (auto* sliced = std::get_if<SlicedParams>(&solver.method))
    sliced->seed = derive_seed(seed, Stream::Projections);
  return solver;
}

TransportPlanResult distance_to_baseline(const ExplanationSet& centered, const SpaceConfig& space,
                                         const SolverConfig& solver, std::uint64_t seed) {
  BaselineSpec baseline = space.baseline;
  baseline.seed = derive_seed(seed, Stream::Baseline);
  const ExplanationSet reference = sample_baseline(baseline, centered.size());
  return transport_distance(centered, reference, space.distance, with_projection_seed(solver, seed));
}

}  // namespace

ExplanationSet dirac_set(const SpaceConfig& space, Index n) {
  Matrix data = Matrix::Zero(n, space.kind.dim);
  if (space.kind.space == SpaceKind::Ranking)
    for (Index i = 0; i < n; ++i)
      for (int j = 0; j < space.kind.dim; ++j) data(i, j) = j;
  return ExplanationSet(space.kind, std::move(data));
}

TransportPlanResult wg_raw(const ExplanationSet& set, const SpaceConfig& space,
                           const SolverConfig& solver, std::uint64_t seed) {
  space.validate();
  check_solver(solver);
  check_set_matches(set, space);
  const ExplanationSet centered = space.centering ? center(set) : set;
  return distance_to_baseline(centered, space, solver, seed);
}

TransportPlanResult dirac_normalizer(const SpaceConfig& space, const SolverConfig& solver, Index n,
                                     std::uint64_t seed) {
  space.validate();
  check_solver(solver);
  auto result = distance_to_baseline(dirac_set(space, n), space, solver, seed);
  if (!(result.distance > 0))
    throw NumericError("Dirac normalizer vanished; the baseline sample is degenerate");
  return result;
}

GlobalnessReport globalness(const ExplanationSet& set, const SpaceConfig& space, const SolverConfig& solver,
                    std::uint64_t seed) {
  const TransportPlanResult raw = wg_raw(set, space, solver, seed);
  const TransportPlanResult norm = dirac_normalizer(space, solver, set.size(), seed);
  GlobalnessReport report;
  report.raw_wg = raw.distance;
  report.dirac_normalizer = norm.distance;
  report.normalized_wg = raw.distance / norm.distance;
  report.n = set.size();
  report.space = space;
  report.solver = raw.method_echo;
  report.seed = seed;
  report.converged = raw.converged && norm.converged;
  report.iterations_used = raw.iterations_used;
  return report;
}

std::vector<ConvergencePoint> convergence_curve(const SetSampler& sampler, const SpaceConfig& space,
                                                const SolverConfig& solver,
                                                std::span<const Index> n_list, int repeats,
                                                std::uint64_t seed, std::optional<double> reference) {
  if (n_list.empty()) throw ConfigError("convergence curve needs at least one N");
  if (repeats < 1) throw ConfigError("convergence curve needs repeats >= 1");
  if (!std::is_sorted(n_list.begin(), n_list.end()))
    throw ConfigError("convergence curve N list must be ascending");

  std::vector<std::vector<double>> estimates(n_list.size());
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    for (int r = 0; r < repeats; ++r) {
      const std::uint64_t run_seed = derive_seed(derive_seed(seed, k), static_cast<std::uint64_t>(r));
      const ExplanationSet set = sampler(n_list[k], derive_seed(run_seed, Stream::Explanations));
      estimates[k].push_back(wg_raw(set, space, solver, run_seed).distance);
    }
  }
  const double ref =
      reference ? *reference
                : std::accumulate(estimates.back().begin(), estimates.back().end(), 0.0) / repeats;

  std::vector<ConvergencePoint> out;
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    std::vector<double> dev;
    for (double e : estimates[k]) dev.push_back(std::abs(e - ref));
    const double mean = std::accumulate(dev.begin(), dev.end(), 0.0) / repeats;
    double var = 0.0;
    for (double d : dev) var += (d - mean) * (d - mean);
    var = repeats > 1 ? var / (repeats - 1) : 0.0;
    out.push_back({n_list[k], mean, std::sqrt(var / repeats)});
  }
  return out;
}

double loglog_slope(std::span<const ConvergencePoint> curve) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& pt : curve) {
    if (!(pt.mean_abs_deviation > 0)) continue;
    const double x = std::log(static_cast<double>(pt.n));
    const double y = std::log(pt.mean_abs_deviation);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) throw ConfigError("slope fit needs at least two positive deviations");
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace wg
