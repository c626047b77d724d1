#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "wg/random.hpp"
#include "wg/spaces.hpp"

namespace wg::test {

inline Matrix gaussian_matrix(Rng& rng, Index n, int s, double sd = 1.0, double mean = 0.0) {
  std::normal_distribution<double> g(mean, sd);
  Matrix m(n, s);
  for (Index i = 0; i < n; ++i)
    for (int j = 0; j < s; ++j) m(i, j) = g(rng);
  return m;
}

inline Matrix random_bits(Rng& rng, Index n, int s) {
  std::bernoulli_distribution coin(0.5);
  Matrix m(n, s);
  for (Index i = 0; i < n; ++i)
    for (int j = 0; j < s; ++j) m(i, j) = coin(rng) ? 1.0 : 0.0;
  return m;
}

inline Matrix random_permutations(Rng& rng, Index n, int s) {
  Matrix m(n, s);
  std::vector<int> perm(static_cast<std::size_t>(s));
  for (Index i = 0; i < n; ++i) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int j = 0; j < s; ++j) m(i, j) = perm[static_cast<std::size_t>(j)];
  }
  return m;
}

// Minimum mean cost over all bijections, by enumeration. n <= 8.
inline double brute_force_assignment(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += cost(i, perm[static_cast<std::size_t>(i)]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / n;
}

// Spearman rank correlation; ties are not expected.
inline double rank_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) r[idx[i]] = static_cast<double>(i);
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n - 1) / 2.0;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace wg::test
