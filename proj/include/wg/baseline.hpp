#pragma once

#include <cstdint>
#include <span>
#include <variant>

#include "wg/spaces.hpp"

namespace wg {

struct UniformBall {
  double radius = 1.0;
};
struct UniformHypercube {};
struct UniformPermutations {};

// Minimally-global reference measure of an explanation space.
struct BaselineSpec {
  std::variant<UniformBall, UniformHypercube, UniformPermutations> shape;
  int dim = 1;
  std::uint64_t seed = 0;

  static BaselineSpec ball(int s, double radius, std::uint64_t seed = 0) {
    return {UniformBall{radius}, s, seed};
  }
  static BaselineSpec hypercube(int s, std::uint64_t seed = 0) { return {UniformHypercube{}, s, seed}; }
  static BaselineSpec permutations(int s, std::uint64_t seed = 0) {
    return {UniformPermutations{}, s, seed};
  }

  SpaceKind space() const;
};

// Throws ConfigError for a non-positive radius, s < 1, or a shape that does
// not belong to `kind`.
void check_baseline(const BaselineSpec& spec, const ExplanationKind& kind);

/// Shared radius k for the attribution baseline: the largest row l2-norm
/// over all sets, so every set's support lies inside the ball.
double estimate_radius_k(std::span<const ExplanationSet> sets);

ExplanationSet sample_baseline(const BaselineSpec& spec, Index n);

// Subtracts the empirical mean row for attribution sets; identity otherwise.
ExplanationSet center(const ExplanationSet& set);

}  // namespace wg
