#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>

#include "wg/spaces.hpp"

namespace wg {

struct Exact1D {};
struct ExactAssignment {};

// `lambda` is the inverse regularization strength, relative to the largest
// entry of the cost matrix: epsilon = max(C) / lambda. Larger lambda means a
// sharper plan closer to the exact transport cost.
struct SinkhornParams {
  double lambda = 100.0;
  int max_iter = 10000;
  double tol = 1e-6;  // L1 marginal error
};

struct SlicedParams {
  int num_projections = 500;
  std::uint64_t seed = 0;
};

struct SolverConfig {
  std::variant<Exact1D, ExactAssignment, SinkhornParams, SlicedParams> method;

  // Sliced for attribution, Sinkhorn for selection and ranking.
  static SolverConfig defaults_for(SpaceKind kind);
  static SolverConfig exact() { return {ExactAssignment{}}; }
  static SolverConfig exact_1d() { return {Exact1D{}}; }
  static SolverConfig sinkhorn(double lambda = 100.0, int max_iter = 10000, double tol = 1e-6) {
    return {SinkhornParams{lambda, max_iter, tol}};
  }
  static SolverConfig sliced(int num_projections = 500, std::uint64_t seed = 0) {
    return {SlicedParams{num_projections, seed}};
  }

  std::string name() const;
};

void check_solver(const SolverConfig& config);

struct TransportPlanResult {
  double distance = 0.0;
  int iterations_used = 0;
  bool converged = true;
  double marginal_error = 0.0;  // Sinkhorn only
  SolverConfig method_echo;
};

// Largest N accepted by the exact assignment solver.
inline constexpr Index kExactAssignmentCap = 512;

/// p-Wasserstein distance between two equal-size, equal-weight 1-D samples
/// by matching order statistics. Inputs need not be pre-sorted.
double wasserstein_1d(std::span<const double> a, std::span<const double> b, double p);

TransportPlanResult wasserstein_exact(const ExplanationSet& a, const ExplanationSet& b,
                                      const DistanceSpec& spec);

/// Entropic-regularized transport in the log domain. Identical rows are
/// merged into weighted atoms first, which leaves the transport problem
/// unchanged and shrinks it drastically for discrete spaces.
TransportPlanResult sinkhorn(const ExplanationSet& a, const ExplanationSet& b,
                             const DistanceSpec& spec, const SinkhornParams& params);

/// Monte Carlo sliced Wasserstein over directions drawn uniformly on the
/// unit sphere. Attribution (Euclidean) sets only.
TransportPlanResult sliced_wasserstein(const ExplanationSet& a, const ExplanationSet& b, double p,
                                       const SlicedParams& params);

// Dispatches on `config.method`.
TransportPlanResult transport_distance(const ExplanationSet& a, const ExplanationSet& b,
                                       const DistanceSpec& spec, const SolverConfig& config);

}  // namespace wg
