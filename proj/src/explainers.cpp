#include "wg/explainers.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "wg/random.hpp"

namespace wg {

std::string ExplainerSpec::name() const {
  struct Visitor {
    std::string operator()(const Saliency& s) const { return s.absolute ? "saliency" : "gradient"; }
    std::string operator()(const InputXGradient&) const { return "input_x_gradient"; }
    std::string operator()(const IntegratedGradients&) const { return "integrated_gradients"; }
    std::string operator()(const Smooth& s) const {
      std::string inner = s.inner ? s.inner->name() : "none";
      return "smooth(" + inner + ")";
    }
    std::string operator()(const ConstantGlobal&) const { return "constant_global"; }
  };
  return std::visit(Visitor{}, method);
}

void check_explainer(const ExplainerSpec& spec) {
  if (const auto* ig = std::get_if<IntegratedGradients>(&spec.method)) {
    if (ig->steps < 1) throw ConfigError("integrated gradients needs steps >= 1");
  } else if (const auto* sm = std::get_if<Smooth>(&spec.method)) {
    if (!sm->inner) throw ConfigError("smooth explainer needs an inner explainer");
    if (!(sm->sigma >= 0)) throw ConfigError("smoothing sigma must be >= 0");
    if (sm->num_draws < 1) throw ConfigError("smoothing needs num_draws >= 1");
    check_explainer(*sm->inner);
  }
}

namespace {

Matrix explain_rows(const MlpModel& model, const Matrix& x, const ExplainerSpec& spec,
                    std::span<const int> targets, std::span<const std::uint64_t> seeds) {
  const Index n = x.rows();
  const Index d = x.cols();

  if (const auto* s = std::get_if<Saliency>(&spec.method)) {
    Matrix g = model.score_gradients(x, targets);
    if (s->absolute) g = g.cwiseAbs();
    return g;
  }
  if (std::holds_alternative<InputXGradient>(spec.method)) {
    return x.cwiseProduct(model.score_gradients(x, targets));
  }
  if (const auto* ig = std::get_if<IntegratedGradients>(&spec.method)) {
    const int steps = ig->steps;
    Matrix path(n * steps, d);
    std::vector<int> path_targets(static_cast<std::size_t>(n * steps));
    for (Index i = 0; i < n; ++i) {
      for (int k = 0; k < steps; ++k) {
        const double alpha = (k + 0.5) / steps;
        path.row(i * steps + k) = alpha * x.row(i);
        path_targets[static_cast<std::size_t>(i * steps + k)] = targets[static_cast<std::size_t>(i)];
      }
    }
    const Matrix grads = model.score_gradients(path, path_targets);
    Matrix out(n, d);
    for (Index i = 0; i < n; ++i)
      out.row(i) = x.row(i).cwiseProduct(grads.middleRows(i * steps, steps).colwise().mean());
    return out;
  }
  if (const auto* cg = std::get_if<ConstantGlobal>(&spec.method)) {
    if (cg->value.size() != d) throw ConfigError("constant global attribution has wrong dimension");
    Matrix out(n, d);
    out.rowwise() = cg->value.transpose();
    return out;
  }

  const auto& sm = std::get<Smooth>(spec.method);
  if (sm.sigma == 0.0) return explain_rows(model, x, *sm.inner, targets, seeds);
  Matrix out(n, d);
  Matrix draws(sm.num_draws, d);
  std::vector<int> draw_targets(static_cast<std::size_t>(sm.num_draws));
  std::vector<std::uint64_t> draw_seeds(static_cast<std::size_t>(sm.num_draws));
  for (Index i = 0; i < n; ++i) {
    Rng rng(derive_seed(seeds[static_cast<std::size_t>(i)], Stream::Smoothing));
    std::normal_distribution<double> normal(0.0, sm.sigma);
    for (int k = 0; k < sm.num_draws; ++k) {
      for (Index j = 0; j < d; ++j) draws(k, j) = x(i, j) + normal(rng);
      draw_targets[static_cast<std::size_t>(k)] = targets[static_cast<std::size_t>(i)];
      draw_seeds[static_cast<std::size_t>(k)] = derive_seed(seeds[static_cast<std::size_t>(i)],
                                                            static_cast<std::uint64_t>(k));
    }
    out.row(i) = explain_rows(model, draws, *sm.inner, draw_targets, draw_seeds).colwise().mean();
  }
  return out;
}

}  // namespace

Matrix explain_all(const MlpModel& model, const Matrix& x, const ExplainerSpec& spec,
                   std::uint64_t seed) {
  check_explainer(spec);
  if (x.cols() != model.input_dim()) throw ConfigError("input dimension does not match the model");
  if (!x.allFinite()) throw ConfigError("inputs to explain must be finite");
  const std::vector<int> targets = model.predict(x);
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(x.rows()));
  for (Index i = 0; i < x.rows(); ++i)
    seeds[static_cast<std::size_t>(i)] = derive_seed(seed, static_cast<std::uint64_t>(i));
  return explain_rows(model, x, spec, targets, seeds);
}

Vector explain(const MlpModel& model, const Vector& x, const ExplainerSpec& spec, std::uint64_t seed) {
  return explain_all(model, Matrix(x.transpose()), spec, seed).row(0).transpose();
}

Vector fit_constant_global(const MlpModel& model, const Matrix& data) {
  return explain_all(model, data, ExplainerSpec::saliency(true)).colwise().mean().transpose();
}

double explainer_accuracy(const JaggedBoundaryTask& task, const Matrix& explanations) {
  if (explanations.cols() != 2) throw ConfigError("explainer accuracy needs two-feature explanations");
  if (explanations.rows() != task.points.rows())
    throw ConfigError("one explanation per task sample required");
  long hits = 0;
  for (Index i = 0; i < explanations.rows(); ++i) {
    const double a0 = std::abs(explanations(i, 0));
    const double a1 = std::abs(explanations(i, 1));
    if (a0 == a1) continue;
    const int top = a0 > a1 ? 0 : 1;
    hits += top == task.ground_truth_feature[static_cast<std::size_t>(i)];
  }
  return static_cast<double>(hits) / static_cast<double>(explanations.rows());
}

}  // namespace wg
