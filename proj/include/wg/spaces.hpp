#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wg/errors.hpp"

namespace wg {

// Row-major so that each explanation is a contiguous span.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class SpaceKind { Attribution, Selection, Ranking };

std::string_view to_string(SpaceKind kind);
SpaceKind parse_space_kind(std::string_view name);

struct ExplanationKind {
  SpaceKind space = SpaceKind::Attribution;
  int dim = 1;

  static ExplanationKind attribution(int s) { return {SpaceKind::Attribution, s}; }
  static ExplanationKind selection(int s) { return {SpaceKind::Selection, s}; }
  static ExplanationKind ranking(int s) { return {SpaceKind::Ranking, s}; }

  friend bool operator==(const ExplanationKind&, const ExplanationKind&) = default;
};

/// Collects every invariant violation of `data` read as explanations of
/// `kind`: finiteness, N >= 1, dimension, and the kind's membership rule
/// (binary entries for selection, permutations of 0..s-1 for ranking).
std::vector<Violation> validate_set(const ExplanationKind& kind, const Matrix& data);

/// N explanation vectors of one kind; the empirical measure over its rows.
/// Construction validates and throws ValidationError on any violation, so
/// every instance satisfies its kind's invariants.
class ExplanationSet {
 public:
  ExplanationSet(ExplanationKind kind, Matrix data);

  const ExplanationKind& kind() const noexcept { return kind_; }
  const Matrix& data() const noexcept { return data_; }
  Index size() const noexcept { return data_.rows(); }
  int dim() const noexcept { return kind_.dim; }
  std::span<const double> row(Index i) const {
    return {data_.data() + i * data_.cols(), static_cast<std::size_t>(data_.cols())};
  }

 private:
  ExplanationKind kind_;
  Matrix data_;
};

enum class Metric { Euclidean, Hamming, KendallTau };

std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view name);

struct DistanceSpec {
  Metric metric = Metric::Euclidean;
  double p = 2.0;  // Wasserstein order

  // Table defaults: Euclidean p=2, Hamming and Kendall-Tau p=1.
  static DistanceSpec defaults_for(SpaceKind kind);
  friend bool operator==(const DistanceSpec&, const DistanceSpec&) = default;
};

Metric default_metric(SpaceKind kind);

// Throws ConfigError unless the metric is the one paired with the space
// and p > 0.
void check_pairing(const ExplanationKind& kind, const DistanceSpec& spec);

double euclidean_distance(std::span<const double> a, std::span<const double> b);
double hamming_distance(std::span<const double> a, std::span<const double> b);
// Number of discordant feature pairs, O(s log s).
double kendall_tau_distance(std::span<const double> a, std::span<const double> b);

double distance(std::span<const double> a, std::span<const double> b, Metric metric);

// Checked entry point: dimensions and kind/metric pairing.
double distance(std::span<const double> a, std::span<const double> b,
                const ExplanationKind& kind, const DistanceSpec& spec);

// N_a x N_b matrix of d(a_i, b_j)^p.
Matrix cost_matrix(const Matrix& a, const Matrix& b, const DistanceSpec& spec);

/// Converts attributions to rankings: position i holds the rank of feature
/// i, rank 0 being the largest value (or magnitude). Ties go to the lower
/// feature index.
Matrix argsort_ranks(const Matrix& attributions, bool by_magnitude = false);
ExplanationSet to_ranking(const Matrix& attributions, bool by_magnitude = false);

}  // namespace wg
