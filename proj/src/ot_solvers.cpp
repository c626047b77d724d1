#include "wg/ot_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "wg/assignment.hpp"
#include "wg/random.hpp"

namespace wg {

SolverConfig SolverConfig::defaults_for(SpaceKind kind) {
  if (kind == SpaceKind::Attribution) return sliced();
  return sinkhorn();
}

std::string SolverConfig::name() const {
  struct Visitor {
    std::string operator()(const Exact1D&) const { return "exact1d"; }
    std::string operator()(const ExactAssignment&) const { return "exact"; }
    std::string operator()(const SinkhornParams&) const { return "sinkhorn"; }
    std::string operator()(const SlicedParams&) const { return "sliced"; }
  };
  return std::visit(Visitor{}, method);
}

void check_solver(const SolverConfig& config) {
  if (const auto* s = std::get_if<SinkhornParams>(&config.method)) {
    if (!(s->lambda > 0) || !std::isfinite(s->lambda)) throw ConfigError("sinkhorn lambda must be > 0");
    if (s->max_iter < 1) throw ConfigError("sinkhorn max_iter must be >= 1");
    if (!(s->tol > 0)) throw ConfigError("sinkhorn tol must be > 0");
  }
  if (const auto* s = std::get_if<SlicedParams>(&config.method)) {
    if (s->num_projections < 1) throw ConfigError("sliced num_projections must be >= 1");
  }
}

namespace {

void require_equal_size(Index na, Index nb) {
  if (na != nb)
    throw ConfigError("measures must have equal sample counts (" + std::to_string(na) + " vs " +
                      std::to_string(nb) + "); resample before calling");
}

double pow_p(double x, double p) {
  if (p == 1.0) return x;
  if (p == 2.0) return x * x;
  return std::pow(x, p);
}

double root_p(double x, double p) {
  if (p == 1.0) return x;
  if (p == 2.0) return std::sqrt(x);
  return std::pow(x, 1.0 / p);
}

// Mean of |a_(i) - b_(i)|^p over sorted inputs.
double sorted_cost(std::span<const double> a, std::span<const double> b, double p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += pow_p(std::abs(a[i] - b[i]), p);
  return acc / static_cast<double>(a.size());
}

struct Atoms {
  Matrix points;
  Vector weights;
};

// Merges identical rows; weights sum to one.
Atoms merge_identical(const Matrix& data) {
  const Index n = data.rows();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  auto row_less = [&](Index x, Index y) {
    for (Index j = 0; j < data.cols(); ++j) {
      if (data(x, j) < data(y, j)) return true;
      if (data(y, j) < data(x, j)) return false;
    }
    return x < y;
  };
  std::sort(order.begin(), order.end(), row_less);
  std::vector<Index> reps;
  std::vector<double> counts;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (!reps.empty() && data.row(reps.back()) == data.row(order[k])) {
      counts.back() += 1.0;
    } else {
      reps.push_back(order[k]);
      counts.push_back(1.0);
    }
  }
  Atoms atoms{Matrix(static_cast<Index>(reps.size()), data.cols()),
              Vector(static_cast<Index>(reps.size()))};
  for (std::size_t k = 0; k < reps.size(); ++k) {
    atoms.points.row(static_cast<Index>(k)) = data.row(reps[k]);
    atoms.weights(static_cast<Index>(k)) = counts[k] / static_cast<double>(n);
  }
  return atoms;
}

double log_sum_exp(const double* x, Index n) {
  const double m = *std::max_element(x, x + n);
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) acc += std::exp(x[i] - m);
  return m + std::log(acc);
}

}  // namespace

double wasserstein_1d(std::span<const double> a, std::span<const double> b, double p) {
  require_equal_size(static_cast<Index>(a.size()), static_cast<Index>(b.size()));
  if (a.empty()) throw ConfigError("wasserstein_1d needs at least one sample");
  if (!(p > 0)) throw ConfigError("Wasserstein order p must be positive");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  return root_p(sorted_cost(sa, sb, p), p);
}

TransportPlanResult wasserstein_exact(const ExplanationSet& a, const ExplanationSet& b,
                                      const DistanceSpec& spec) {
  check_pairing(a.kind(), spec);
  check_pairing(b.kind(), spec);
  require_equal_size(a.size(), b.size());
  if (a.size() > kExactAssignmentCap)
    throw ConfigError("exact assignment is limited to N <= " + std::to_string(kExactAssignmentCap) +
                      " (got " + std::to_string(a.size()) +
                      "); use the sinkhorn or sliced approximation");
  const Matrix cost = cost_matrix(a.data(), b.data(), spec);
  const Assignment assignment = solve_assignment(cost);
  TransportPlanResult out;
  out.distance = root_p(std::max(0.0, assignment.total_cost / static_cast<double>(a.size())), spec.p);
  out.iterations_used = 1;
  out.converged = true;
  out.method_echo = SolverConfig::exact();
  return out;
}

namespace {

bool atoms_less(const Atoms& x, const Atoms& y) {
  if (x.points.rows() != y.points.rows()) return x.points.rows() < y.points.rows();
  const auto px = std::span<const double>(x.points.data(), static_cast<std::size_t>(x.points.size()));
  const auto py = std::span<const double>(y.points.data(), static_cast<std::size_t>(y.points.size()));
  if (!std::ranges::equal(px, py)) return std::ranges::lexicographical_compare(px, py);
  const auto wx = std::span<const double>(x.weights.data(), static_cast<std::size_t>(x.weights.size()));
  const auto wy = std::span<const double>(y.weights.data(), static_cast<std::size_t>(y.weights.size()));
  return std::ranges::lexicographical_compare(wx, wy);
}

}  // namespace

TransportPlanResult sinkhorn(const ExplanationSet& a, const ExplanationSet& b,
                             const DistanceSpec& spec, const SinkhornParams& params) {
  check_pairing(a.kind(), spec);
  check_pairing(b.kind(), spec);
  check_solver(SolverConfig{params});
  require_equal_size(a.size(), b.size());

  Atoms src = merge_identical(a.data());
  Atoms dst = merge_identical(b.data());
  // Iterate on a canonical argument order so the result is exactly symmetric.
  if (atoms_less(dst, src)) std::swap(src, dst);
  const Matrix cost = cost_matrix(src.points, dst.points, spec);
  const Index n = cost.rows();
  const Index m = cost.cols();

  TransportPlanResult out;
  out.method_echo = SolverConfig{params};
  const double cmax = cost.maxCoeff();
  if (n == 1 || m == 1 || !(cmax > 0)) {
    // Only one feasible plan (product coupling), or all costs vanish.
    const double total = (src.weights.transpose() * cost * dst.weights).value();
    out.distance = root_p(std::max(0.0, total), spec.p);
    out.iterations_used = 0;
    out.converged = true;
    return out;
  }

  const double eps = cmax / params.lambda;
  // Kernel in log space, stored both ways for cache-friendly reductions.
  const Matrix log_k = -cost / eps;
  const Matrix log_k_t = log_k.transpose();
  const Vector log_a = src.weights.array().log();
  const Vector log_b = dst.weights.array().log();
  Vector f = Vector::Zero(n);  // scaled potentials f/eps
  Vector g = Vector::Zero(m);
  std::vector<double> buf(static_cast<std::size_t>(std::max(n, m)));

  auto row_marginal_error = [&]() {
    double err = 0.0;
    for (Index i = 0; i < n; ++i) {
      double r = 0.0;
      for (Index j = 0; j < m; ++j) r += std::exp(f(i) + g(j) + log_k(i, j));
      err += std::abs(r - src.weights(i));
    }
    return err;
  };

  int it = 0;
  double err = 0.0;
  bool converged = false;
  for (it = 1; it <= params.max_iter; ++it) {
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < m; ++j) buf[static_cast<std::size_t>(j)] = g(j) + log_k(i, j);
      f(i) = log_a(i) - log_sum_exp(buf.data(), m);
    }
    for (Index j = 0; j < m; ++j) {
      for (Index i = 0; i < n; ++i) buf[static_cast<std::size_t>(i)] = f(i) + log_k_t(j, i);
      g(j) = log_b(j) - log_sum_exp(buf.data(), n);
    }
    if (it % 10 == 0 || it == params.max_iter || it == 1) {
      err = row_marginal_error();
      if (!std::isfinite(err)) throw NumericError("sinkhorn produced non-finite potentials");
      if (err < params.tol) {
        converged = true;
        break;
      }
    }
  }

  double total = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j) total += std::exp(f(i) + g(j) + log_k(i, j)) * cost(i, j);
  out.distance = root_p(std::max(0.0, total), spec.p);
  out.iterations_used = std::min(it, params.max_iter);
  out.converged = converged;
  out.marginal_error = err;
  return out;
}

TransportPlanResult sliced_wasserstein(const ExplanationSet& a, const ExplanationSet& b, double p,
                                       const SlicedParams& params) {
  if (a.kind().space != SpaceKind::Attribution || b.kind().space != SpaceKind::Attribution)
    throw ConfigError("sliced Wasserstein requires attribution (Euclidean) sets; use sinkhorn or exact");
  if (a.dim() != b.dim()) throw ConfigError("dimension mismatch between measures");
  if (!(p > 0)) throw ConfigError("Wasserstein order p must be positive");
  check_solver(SolverConfig{params});
  require_equal_size(a.size(), b.size());

  const Index n = a.size();
  const int s = a.dim();
  Rng rng(params.seed);
  std::normal_distribution<double> normal;
  Vector theta(s);
  Vector pa(n), pb(n);
  double acc = 0.0;
  for (int k = 0; k < params.num_projections; ++k) {
    double norm = 0.0;
    do {
      for (int j = 0; j < s; ++j) theta(j) = normal(rng);
      norm = theta.norm();
    } while (norm == 0.0);
    theta /= norm;
    pa.noalias() = a.data() * theta;
    pb.noalias() = b.data() * theta;
    std::sort(pa.data(), pa.data() + n);
    std::sort(pb.data(), pb.data() + n);
    acc += sorted_cost({pa.data(), static_cast<std::size_t>(n)},
                       {pb.data(), static_cast<std::size_t>(n)}, p);
  }
  TransportPlanResult out;
  out.distance = root_p(acc / params.num_projections, p);
  out.iterations_used = params.num_projections;
  out.converged = true;
  out.method_echo = SolverConfig{params};
  return out;
}

TransportPlanResult transport_distance(const ExplanationSet& a, const ExplanationSet& b,
                                       const DistanceSpec& spec, const SolverConfig& config) {
  check_solver(config);
  if (std::holds_alternative<Exact1D>(config.method)) {
    if (a.dim() != 1 || b.dim() != 1 || spec.metric != Metric::Euclidean)
      throw ConfigError("exact1d solver needs one-dimensional attribution sets");
    TransportPlanResult out;
    out.distance = wasserstein_1d({a.data().data(), static_cast<std::size_t>(a.size())},
                                  {b.data().data(), static_cast<std::size_t>(b.size())}, spec.p);
    out.iterations_used = 1;
    out.method_echo = config;
    return out;
  }
  if (std::holds_alternative<ExactAssignment>(config.method)) return wasserstein_exact(a, b, spec);
  if (const auto* s = std::get_if<SinkhornParams>(&config.method)) return sinkhorn(a, b, spec, *s);
  check_pairing(a.kind(), spec);
  return sliced_wasserstein(a, b, spec.p, std::get<SlicedParams>(config.method));
}

}  // namespace wg
