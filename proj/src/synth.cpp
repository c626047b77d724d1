#include "wg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "wg/random.hpp"

namespace wg {

std::vector<double> gaussian_mixture_1d(std::uint64_t seed, Index n,
                                        const std::vector<MixtureComponent>& components) {
  if (n < 1) throw ConfigError("mixture sample count must be >= 1");
  if (components.empty()) throw ConfigError("mixture needs at least one component");
  std::vector<double> weights;
  for (const auto& c : components) weights.push_back(c.weight);
  Rng rng(seed);
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  std::normal_distribution<double> normal;
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& x : out) {
    const auto& c = components[static_cast<std::size_t>(pick(rng))];
    x = c.mean + c.sd * normal(rng);
  }
  return out;
}

std::vector<int> flood_labels(const Matrix& points, std::vector<int> labels, double radius,
                              std::uint64_t seed) {
  const Index n = points.rows();
  if (!(radius > 0)) return labels;
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const double r2 = radius * radius;
  std::vector<char> visited(static_cast<std::size_t>(n), 0);
  for (Index x : order) {
    if (visited[static_cast<std::size_t>(x)]) continue;
    visited[static_cast<std::size_t>(x)] = 1;
    for (Index y = 0; y < n; ++y) {
      if (visited[static_cast<std::size_t>(y)]) continue;
      if ((points.row(y) - points.row(x)).squaredNorm() < r2) {
        labels[static_cast<std::size_t>(y)] = labels[static_cast<std::size_t>(x)];
        visited[static_cast<std::size_t>(y)] = 1;
      }
    }
  }
  return labels;
}

JaggedBoundaryTask jagged_boundary(const JaggedBoundaryConfig& config) {
  if (config.n < 4 || config.n % 2 != 0)
    throw ConfigError("jagged boundary needs an even N >= 4");
  if (config.perturbation_scale < 0) throw ConfigError("perturbation scale must be >= 0");

  Rng rng(derive_seed(config.seed, Stream::Dataset));
  std::normal_distribution<double> normal;
  JaggedBoundaryTask task;
  task.points.resize(config.n, 2);
  task.perturbation_scale = config.perturbation_scale;
  task.seed = config.seed;
  const Index half = config.n / 2;
  for (Index i = 0; i < config.n; ++i) {
    const int c = i < half ? 0 : 1;
    const double cx = c == 0 ? -config.cluster_offset : config.cluster_offset;
    task.points(i, 0) = cx + config.cluster_sd * normal(rng);
    task.points(i, 1) = config.cluster_sd * normal(rng);
    const int feature = c;  // cluster 0 splits along x0, cluster 1 along x1
    const double center = feature == 0 ? cx : 0.0;
    task.cluster.push_back(c);
    task.ground_truth_feature.push_back(feature);
    task.clean_labels.push_back(task.points(i, feature) > center ? 1 : 0);
  }
  task.labels = flood_labels(task.points, task.clean_labels, config.perturbation_scale,
                             derive_seed(config.seed, Stream::Perturbation));
  return task;
}

Matrix ground_truth_one_hot(const JaggedBoundaryTask& task) {
  Matrix out = Matrix::Zero(task.points.rows(), 2);
  for (Index i = 0; i < out.rows(); ++i) out(i, task.ground_truth_feature[static_cast<std::size_t>(i)]) = 1.0;
  return out;
}

namespace {

void require_attribution(const ExplanationSet& set, const char* what) {
  if (set.kind().space != SpaceKind::Attribution)
    throw ConfigError(std::string(what) + " applies to attribution sets only");
}

}  // namespace

ExplanationSet apply_transform(const ExplanationSet& set, const TransformSpec& transform) {
  const int s = set.dim();
  Matrix data = set.data();
  if (const auto* t = std::get_if<Translate>(&transform)) {
    require_attribution(set, "translation");
    if (t->offset.size() != s) throw ConfigError("translation vector has wrong dimension");
    data.rowwise() += t->offset.transpose();
  } else if (const auto* r = std::get_if<Reflect>(&transform)) {
    require_attribution(set, "reflection");
    if (r->axis < 0 || r->axis >= s) throw ConfigError("reflection axis out of range");
    data.col(r->axis) *= -1.0;
  } else if (const auto* r = std::get_if<Rotate>(&transform)) {
    require_attribution(set, "rotation");
    if (r->axis_a < 0 || r->axis_b < 0 || r->axis_a >= s || r->axis_b >= s || r->axis_a == r->axis_b)
      throw ConfigError("rotation plane axes out of range");
    const double c = std::cos(r->angle), sn = std::sin(r->angle);
    const Vector a = data.col(r->axis_a), b = data.col(r->axis_b);
    data.col(r->axis_a) = c * a - sn * b;
    data.col(r->axis_b) = sn * a + c * b;
  } else if (const auto* sc = std::get_if<Scale>(&transform)) {
    require_attribution(set, "scaling");
    data *= sc->factor;
  } else {
    const auto& perm = std::get<PermuteFeatures>(transform).permutation;
    std::vector<int> sorted(perm);
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> identity(static_cast<std::size_t>(s));
    std::iota(identity.begin(), identity.end(), 0);
    if (sorted != identity) throw ConfigError("feature permutation is not a permutation of 0..s-1");
    for (int j = 0; j < s; ++j) data.col(j) = set.data().col(perm[static_cast<std::size_t>(j)]);
  }
  return ExplanationSet(set.kind(), std::move(data));
}

}  // namespace wg
