#include "wg/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace wg {

std::string describe(const std::vector<Violation>& violations) {
  std::ostringstream out;
  bool first = true;
  for (const auto& v : violations) {
    if (!first) out << "; ";
    first = false;
    if (v.row) out << "row " << *v.row << ": ";
    out << v.message;
  }
  return out.str();
}

std::string_view to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::Attribution: return "attribution";
    case SpaceKind::Selection: return "selection";
    case SpaceKind::Ranking: return "ranking";
  }
  return "unknown";
}

SpaceKind parse_space_kind(std::string_view name) {
  if (name == "attribution") return SpaceKind::Attribution;
  if (name == "selection") return SpaceKind::Selection;
  if (name == "ranking") return SpaceKind::Ranking;
  throw ConfigError("unknown explanation space '" + std::string(name) + "'");
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::Euclidean: return "euclidean";
    case Metric::Hamming: return "hamming";
    case Metric::KendallTau: return "kendalltau";
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  if (name == "euclidean") return Metric::Euclidean;
  if (name == "hamming") return Metric::Hamming;
  if (name == "kendalltau") return Metric::KendallTau;
  throw ConfigError("unknown metric '" + std::string(name) + "'");
}

std::vector<Violation> validate_set(const ExplanationKind& kind, const Matrix& data) {
  std::vector<Violation> out;
  if (kind.dim < 1) out.push_back({std::nullopt, "s >= 1"});
  if (data.rows() < 1) out.push_back({std::nullopt, "N >= 1"});
  if (data.rows() > 0 && data.cols() != kind.dim) {
    out.push_back({std::nullopt, "dimension mismatch: expected s = " + std::to_string(kind.dim) +
                                     ", got " + std::to_string(data.cols())});
    return out;
  }
  std::vector<char> seen(static_cast<std::size_t>(std::max(kind.dim, 0)));
  for (Index i = 0; i < data.rows(); ++i) {
    const auto row = data.row(i);
    if (!row.allFinite()) {
      out.push_back({static_cast<long>(i), "non-finite entry"});
      continue;
    }
    switch (kind.space) {
      case SpaceKind::Attribution:
        break;
      case SpaceKind::Selection:
        if ((row.array() != 0.0 && row.array() != 1.0).any())
          out.push_back({static_cast<long>(i), "non-binary entry"});
        break;
      case SpaceKind::Ranking: {
        std::fill(seen.begin(), seen.end(), 0);
        bool ok = true;
        for (Index j = 0; j < row.size() && ok; ++j) {
          const double v = row(j);
          if (v != std::floor(v) || v < 0 || v >= kind.dim || seen[static_cast<std::size_t>(v)]) {
            ok = false;
          } else {
            seen[static_cast<std::size_t>(v)] = 1;
          }
        }
        if (!ok) out.push_back({static_cast<long>(i), "not a permutation of 0..s-1"});
        break;
      }
    }
  }
  return out;
}

ExplanationSet::ExplanationSet(ExplanationKind kind, Matrix data)
    : kind_(kind), data_(std::move(data)) {
  auto violations = validate_set(kind_, data_);
  if (!violations.empty()) throw ValidationError(std::move(violations));
}

Metric default_metric(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::Attribution: return Metric::Euclidean;
    case SpaceKind::Selection: return Metric::Hamming;
    case SpaceKind::Ranking: return Metric::KendallTau;
  }
  return Metric::Euclidean;
}

DistanceSpec DistanceSpec::defaults_for(SpaceKind kind) {
  const Metric m = default_metric(kind);
  return {m, m == Metric::Euclidean ? 2.0 : 1.0};
}

void check_pairing(const ExplanationKind& kind, const DistanceSpec& spec) {
  if (!(spec.p > 0) || !std::isfinite(spec.p))
    throw ConfigError("Wasserstein order p must be positive");
  if (default_metric(kind.space) != spec.metric)
    throw ConfigError("metric '" + std::string(to_string(spec.metric)) +
                      "' cannot be used with the " + std::string(to_string(kind.space)) +
                      " space");
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double hamming_distance(std::span<const double> a, std::span<const double> b) {
  double n = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) n += (a[i] != b[i]) ? 1.0 : 0.0;
  return n;
}

namespace {

// Counts inversions of `v` by merge sort; `v` is left sorted.
std::int64_t count_inversions(std::vector<int>& v, std::vector<int>& scratch, std::size_t lo,
                              std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t inv = count_inversions(v, scratch, lo, mid) + count_inversions(v, scratch, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      inv += static_cast<std::int64_t>(mid - i);
      scratch[k++] = v[j++];
    } else {
      scratch[k++] = v[i++];
    }
  }
  while (i < mid) scratch[k++] = v[i++];
  while (j < hi) scratch[k++] = v[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
            scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return inv;
}

}  // namespace

double kendall_tau_distance(std::span<const double> a, std::span<const double> b) {
  // Order features by their rank under a, then count inversions of b's ranks.
  const std::size_t s = a.size();
  std::vector<int> order(s);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return a[static_cast<std::size_t>(i)] < a[static_cast<std::size_t>(j)];
  });
  std::vector<int> seq(s), scratch(s);
  for (std::size_t i = 0; i < s; ++i)
    seq[i] = static_cast<int>(b[static_cast<std::size_t>(order[i])]);
  return static_cast<double>(count_inversions(seq, scratch, 0, s));
}

double distance(std::span<const double> a, std::span<const double> b, Metric metric) {
  if (a.size() != b.size())
    throw ConfigError("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()));
  switch (metric) {
    case Metric::Euclidean: return euclidean_distance(a, b);
    case Metric::Hamming: return hamming_distance(a, b);
    case Metric::KendallTau: return kendall_tau_distance(a, b);
  }
  return 0.0;
}

double distance(std::span<const double> a, std::span<const double> b, const ExplanationKind& kind,
                const DistanceSpec& spec) {
  check_pairing(kind, spec);
  if (a.size() != static_cast<std::size_t>(kind.dim) || b.size() != a.size())
    throw ConfigError("dimension mismatch: vectors must have s = " + std::to_string(kind.dim));
  return distance(a, b, spec.metric);
}

Matrix cost_matrix(const Matrix& a, const Matrix& b, const DistanceSpec& spec) {
  if (a.cols() != b.cols()) throw ConfigError("dimension mismatch between measures");
  Matrix c(a.rows(), b.rows());
  const auto cols = static_cast<std::size_t>(a.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    std::span<const double> ai(a.data() + i * a.cols(), cols);
    for (Index j = 0; j < b.rows(); ++j) {
      std::span<const double> bj(b.data() + j * b.cols(), cols);
      const double d = distance(ai, bj, spec.metric);
      c(i, j) = spec.p == 1.0 ? d : (spec.p == 2.0 ? d * d : std::pow(d, spec.p));
    }
  }
  return c;
}

Matrix argsort_ranks(const Matrix& attributions, bool by_magnitude) {
  Matrix ranks(attributions.rows(), attributions.cols());
  std::vector<int> order(static_cast<std::size_t>(attributions.cols()));
  for (Index i = 0; i < attributions.rows(); ++i) {
    auto key = [&](int j) {
      const double v = attributions(i, j);
      return by_magnitude ? std::abs(v) : v;
    };
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return key(x) > key(y); });
    for (std::size_t r = 0; r < order.size(); ++r) ranks(i, order[r]) = static_cast<double>(r);
  }
  return ranks;
}

ExplanationSet to_ranking(const Matrix& attributions, bool by_magnitude) {
  return ExplanationSet(ExplanationKind::ranking(static_cast<int>(attributions.cols())),
                        argsort_ranks(attributions, by_magnitude));
}

}  // namespace wg
