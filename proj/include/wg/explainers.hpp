#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>

#include "wg/mlp.hpp"
#include "wg/synth.hpp"

namespace wg {

struct ExplainerSpec;

// |d score / dx| by default; signed gradients when absolute = false.
struct Saliency {
  bool absolute = true;
};
struct InputXGradient {};
// Zero-vector baseline, midpoint rule over `steps` points of the path.
struct IntegratedGradients {
  int steps = 64;
};
// Mean of the inner explainer over x + N(0, sigma^2 I) draws.
struct Smooth {
  std::shared_ptr<const ExplainerSpec> inner;
  double sigma = 0.0;
  int num_draws = 500;
};
// The same dataset-level attribution for every input.
struct ConstantGlobal {
  Vector value;
};

struct ExplainerSpec {
  std::variant<Saliency, InputXGradient, IntegratedGradients, Smooth, ConstantGlobal> method;

  static ExplainerSpec saliency(bool absolute = true) { return {Saliency{absolute}}; }
  static ExplainerSpec input_x_gradient() { return {InputXGradient{}}; }
  static ExplainerSpec integrated_gradients(int steps = 64) { return {IntegratedGradients{steps}}; }
  static ExplainerSpec smooth(ExplainerSpec inner, double sigma, int num_draws = 500) {
    return {Smooth{std::make_shared<const ExplainerSpec>(std::move(inner)), sigma, num_draws}};
  }
  static ExplainerSpec constant_global(Vector value) { return {ConstantGlobal{std::move(value)}}; }

  std::string name() const;
};

void check_explainer(const ExplainerSpec& spec);

/// Explains each row of `x` for the model's predicted class at that row.
/// Smoothing noise for row i comes from derive_seed(seed, i), so results do
/// not depend on batching.
Matrix explain_all(const MlpModel& model, const Matrix& x, const ExplainerSpec& spec,
                   std::uint64_t seed = 0);

Vector explain(const MlpModel& model, const Vector& x, const ExplainerSpec& spec,
               std::uint64_t seed = 0);

// Mean absolute saliency over `data`: the attribution a global explainer
// reports for every input.
Vector fit_constant_global(const MlpModel& model, const Matrix& data);

/// Fraction of samples whose largest-magnitude attribution is the
/// ground-truth feature. Ties in the argmax count as incorrect.
double explainer_accuracy(const JaggedBoundaryTask& task, const Matrix& explanations);

}  // namespace wg
