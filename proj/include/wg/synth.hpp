#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "wg/spaces.hpp"

namespace wg {

// 0.5 N(3, 0.5^2) + 0.5 N(-12, 1.9^2): the bimodal 1-D explanation law of
// the transformation study.
struct MixtureComponent {
  double weight;
  double mean;
  double sd;
};
inline const std::vector<MixtureComponent> kStudyMixture = {{0.5, 3.0, 0.5}, {0.5, -12.0, 1.9}};

std::vector<double> gaussian_mixture_1d(std::uint64_t seed, Index n,
                                        const std::vector<MixtureComponent>& components = kStudyMixture);

struct JaggedBoundaryConfig {
  Index n = 1000;  // even, >= 4; split equally between the clusters
  double perturbation_scale = 0.0;
  double cluster_offset = 3.0;  // clusters at (-offset, 0) and (offset, 0)
  double cluster_sd = 0.8;
  std::uint64_t seed = 0;
};

/// Two Gaussian clusters in the plane. Cluster 0 at (-3, 0) is split into
/// classes along feature 0, cluster 1 at (3, 0) along feature 1; that
/// feature is each point's ground-truth explanation. Labels are then
/// flooded over neighborhoods of radius `perturbation_scale`.
struct JaggedBoundaryTask {
  Matrix points;                    // N x 2
  std::vector<int> labels;          // after perturbation
  std::vector<int> clean_labels;    // before perturbation
  std::vector<int> cluster;         // 0 or 1
  std::vector<int> ground_truth_feature;
  double perturbation_scale = 0.0;
  std::uint64_t seed = 0;
};

JaggedBoundaryTask jagged_boundary(const JaggedBoundaryConfig& config);

/// Label flood over open balls of radius `radius`: visit points in a
/// seeded random order; each unvisited point is marked visited and copies
/// its label to every unvisited neighbor, which become visited too.
std::vector<int> flood_labels(const Matrix& points, std::vector<int> labels, double radius,
                              std::uint64_t seed);

// Ground-truth explanations as one-hot attribution rows.
Matrix ground_truth_one_hot(const JaggedBoundaryTask& task);

struct Translate {
  Vector offset;
};
struct Reflect {
  int axis = 0;  // negates this coordinate
};
struct Rotate {
  double angle = 0.0;
  int axis_a = 0;
  int axis_b = 1;
};
struct Scale {
  double factor = 1.0;
};
struct PermuteFeatures {
  std::vector<int> permutation;  // new feature j takes old feature permutation[j]
};

using TransformSpec = std::variant<Translate, Reflect, Rotate, Scale, PermuteFeatures>;

// Geometric transforms apply to attribution sets only; feature permutation
// applies to any kind.
ExplanationSet apply_transform(const ExplanationSet& set, const TransformSpec& transform);

}  // namespace wg
