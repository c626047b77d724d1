#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "wg/baseline.hpp"
#include "wg/ot_solvers.hpp"
#include "wg/spaces.hpp"

namespace wg {

// One metric-space configuration: (E, d_E), baseline U_E and centering.
struct SpaceConfig {
  ExplanationKind kind;
  DistanceSpec distance;
  BaselineSpec baseline;
  bool centering = true;

  static SpaceConfig attribution(int s, double radius, double p = 2.0);
  static SpaceConfig selection(int s, double p = 1.0);
  static SpaceConfig ranking(int s, double p = 1.0);

  // Throws ConfigError unless kind, metric and baseline belong together
  // (ball/Euclidean, hypercube/Hamming, permutations/Kendall tau).
  void validate() const;
};

struct GlobalnessReport {
  double raw_wg = 0.0;
  double dirac_normalizer = 0.0;
  double normalized_wg = 0.0;  // raw / normalizer, not clamped
  Index n = 0;
  SpaceConfig space;
  SolverConfig solver;
  std::uint64_t seed = 0;
  bool converged = true;
  int iterations_used = 0;
};

/// Empirical globalness: center the set, draw N baseline points, and return
/// the solver's transport distance between the two empirical measures.
/// Baseline and projection streams are derived from `seed`.
TransportPlanResult wg_raw(const ExplanationSet& set, const SpaceConfig& space,
                           const SolverConfig& solver, std::uint64_t seed);

/// Globalness of the centered point mass (origin, all-zeros vertex, or
/// identity permutation), through the same baseline draw and solver path
/// as wg_raw with the same seed.
TransportPlanResult dirac_normalizer(const SpaceConfig& space, const SolverConfig& solver, Index n,
                                     std::uint64_t seed);

GlobalnessReport globalness(const ExplanationSet& set, const SpaceConfig& space, const SolverConfig& solver,
                    std::uint64_t seed);

// The point mass used by the normalizer, repeated n times.
ExplanationSet dirac_set(const SpaceConfig& space, Index n);

using SetSampler = std::function<ExplanationSet(Index n, std::uint64_t seed)>;

struct ConvergencePoint {
  Index n = 0;
  double mean_abs_deviation = 0.0;
  double standard_error = 0.0;
};

/// Mean |G_hat(N) - G_ref| over `repeats` seeds for each N. The reference is
/// `reference` when given, otherwise the mean estimate at the largest N.
std::vector<ConvergencePoint> convergence_curve(const SetSampler& sampler, const SpaceConfig& space,
                                                const SolverConfig& solver,
                                                std::span<const Index> n_list, int repeats,
                                                std::uint64_t seed,
                                                std::optional<double> reference = std::nullopt);

// Least-squares slope of log(deviation) against log(N).
double loglog_slope(std::span<const ConvergencePoint> curve);

}  // namespace wg
