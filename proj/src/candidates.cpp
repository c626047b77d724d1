#include "wg/candidates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "wg/globalness.hpp"

namespace wg {

Density1D uniform_density(double lo, double hi) {
  if (!(hi > lo)) throw ConfigError("uniform density needs lo < hi");
  const double h = 1.0 / (hi - lo);
  return {[=](double x) { return (x >= lo && x <= hi) ? h : 0.0; }, lo, hi,
          [=](Rng& rng) { return std::uniform_real_distribution<double>(lo, hi)(rng); }};
}

Density1D mixture_density(const std::vector<MixtureComponent>& components) {
  if (components.empty()) throw ConfigError("mixture needs at least one component");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::vector<double> weights;
  for (const auto& c : components) {
    if (!(c.sd > 0)) throw ConfigError("mixture component sd must be > 0");
    lo = std::min(lo, c.mean - 8.0 * c.sd);
    hi = std::max(hi, c.mean + 8.0 * c.sd);
    weights.push_back(c.weight);
  }
  double total = 0.0;
  for (double w : weights) total += w;
  auto pdf = [components, total, lo, hi](double x) {
    if (x < lo || x > hi) return 0.0;
    double acc = 0.0;
    for (const auto& c : components) {
      const double z = (x - c.mean) / c.sd;
      acc += c.weight * std::exp(-0.5 * z * z) / (c.sd * std::sqrt(2.0 * std::numbers::pi));
    }
    return acc / total;
  };
  auto sample = [components, pick = std::discrete_distribution<int>(weights.begin(), weights.end()),
                 lo, hi](Rng& rng) mutable {
    for (;;) {
      const auto& c = components[static_cast<std::size_t>(pick(rng))];
      const double x = c.mean + c.sd * std::normal_distribution<double>()(rng);
      if (x >= lo && x <= hi) return x;
    }
  };
  return {pdf, lo, hi, sample};
}

Density1D normal_density(double mean, double sd) { return mixture_density({{1.0, mean, sd}}); }

double integrate_density(const Density1D& d, int panels) {
  if (panels % 2 != 0) ++panels;
  const double h = (d.hi - d.lo) / panels;
  double acc = d.pdf(d.lo) + d.pdf(d.hi);
  for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * d.pdf(d.lo + i * h);
  return acc * h / 3.0;
}

Map1D identity_map() {
  return {"identity", [](double x) { return x; }, [](double y) { return y; }, 1.0,
          [](double lo, double hi) { return std::pair{lo, hi}; }};
}

Map1D reflect_map() {
  return {"reflect", [](double x) { return -x; }, [](double y) { return -y; }, 1.0,
          [](double lo, double hi) { return std::pair{-hi, -lo}; }};
}

Map1D translate_map(double offset) {
  return {"translate", [=](double x) { return x + offset; }, [=](double y) { return y - offset; },
          1.0, [=](double lo, double hi) { return std::pair{lo + offset, hi + offset}; }};
}

Map1D scale_map(double factor) {
  if (factor == 0.0) throw ConfigError("scale factor must be non-zero");
  return {"scale", [=](double x) { return factor * x; }, [=](double y) { return y / factor; },
          std::abs(factor), [=](double lo, double hi) {
            return factor > 0 ? std::pair{factor * lo, factor * hi} : std::pair{factor * hi, factor * lo};
          }};
}

Map1D interval_swap_map(double lo, double hi, double cut) {
  if (!(lo < cut && cut < hi)) throw ConfigError("interval swap needs lo < cut < hi");
  const double upper_len = hi - cut;
  auto fwd = [=](double x) {
    if (x < lo || x >= hi) return x;
    return x >= cut ? x - cut + lo : x + upper_len;
  };
  auto inv = [=](double y) {
    if (y < lo || y >= hi) return y;
    return y < lo + upper_len ? y + cut - lo : y - upper_len;
  };
  auto image = [=](double a, double b) {
    // Hull of the images of the pieces of [a, b].
    double out_lo = std::numeric_limits<double>::infinity();
    double out_hi = -out_lo;
    auto add = [&](double p, double q) {
      if (p > q) return;
      out_lo = std::min(out_lo, p);
      out_hi = std::max(out_hi, q);
    };
    add(a, std::min(b, lo));  // left of the domain, fixed
    add(std::max(a, hi), b);  // right of the domain, fixed
    const double l1 = std::max(a, lo), r1 = std::min(b, cut);
    if (l1 < r1) add(l1 + upper_len, r1 + upper_len);
    const double l2 = std::max(a, cut), r2 = std::min(b, hi);
    if (l2 <= r2) add(l2 - cut + lo, r2 - cut + lo);
    return std::pair{out_lo, out_hi};
  };
  return {"interval_swap", fwd, inv, 1.0, image};
}

Density1D pushforward(const Density1D& d, const Map1D& map) {
  const auto [lo, hi] = map.image_of_interval(d.lo, d.hi);
  auto pdf = [base = d.pdf, inv = map.inverse, jac = map.abs_jacobian](double y) {
    return base(inv(y)) / jac;
  };
  auto sample = [base = d.sample, fwd = map.forward](Rng& rng) { return fwd(base(rng)); };
  return {pdf, lo, hi, sample};
}

namespace {

MCEstimate summarize(double sum, double sum_sq, long n) {
  MCEstimate out;
  if (n <= 0) {
    out.defined = false;
    return out;
  }
  out.value = sum / n;
  const double var = n > 1 ? std::max(0.0, (sum_sq - n * out.value * out.value) / (n - 1)) : 0.0;
  out.standard_error = std::sqrt(var / n);
  return out;
}

}  // namespace

MCEstimate entropy_mc(const Density1D& d, long num_samples, std::uint64_t seed) {
  if (num_samples < 1) throw ConfigError("entropy estimate needs samples");
  Rng rng(seed);
  double sum = 0.0, sum_sq = 0.0;
  long used = 0, excluded = 0;
  for (long i = 0; i < num_samples; ++i) {
    const double x = d.sample(rng);
    const double px = d.pdf(x);
    if (!(px > 0)) {
      ++excluded;
      continue;
    }
    const double v = -std::log(px);
    sum += v;
    sum_sq += v * v;
    ++used;
  }
  MCEstimate out = summarize(sum, sum_sq, used);
  out.excluded = excluded;
  return out;
}

MCEstimate kl_mc(const Density1D& nu, const Density1D& u, long num_samples, std::uint64_t seed) {
  if (num_samples < 1) throw ConfigError("KL estimate needs samples");
  if (nu.lo < u.lo || nu.hi > u.hi) {
    MCEstimate out;
    out.defined = false;
    return out;
  }
  Rng rng(seed);
  double sum = 0.0, sum_sq = 0.0;
  long used = 0, excluded = 0;
  for (long i = 0; i < num_samples; ++i) {
    const double x = u.sample(rng);
    const double ux = u.pdf(x);
    if (!(ux > 0)) {
      ++excluded;
      continue;
    }
    const double t = nu.pdf(x) / ux;
    const double v = t > 0 ? t * std::log(t) : 0.0;
    sum += v;
    sum_sq += v * v;
    ++used;
  }
  MCEstimate out = summarize(sum, sum_sq, used);
  out.excluded = excluded;
  return out;
}

MCEstimate tv_mc(const Density1D& nu, const Density1D& u, long num_samples, std::uint64_t seed) {
  if (num_samples < 1) throw ConfigError("TV estimate needs samples");
  Rng rng(seed);
  // 1/2 E_u|1 - nu/u| covers supp(u); nu's mass outside supp(u) adds 1/2 P_nu(out).
  double sum = 0.0, sum_sq = 0.0;
  for (long i = 0; i < num_samples; ++i) {
    const double x = u.sample(rng);
    const double v = 0.5 * std::abs(1.0 - nu.pdf(x) / u.pdf(x));
    sum += v;
    sum_sq += v * v;
  }
  MCEstimate inside = summarize(sum, sum_sq, num_samples);
  double outside = 0.0;
  if (nu.lo < u.lo || nu.hi > u.hi) {
    long count = 0;
    for (long i = 0; i < num_samples; ++i) {
      const double x = nu.sample(rng);
      if (x < u.lo || x > u.hi) ++count;
    }
    const double frac = static_cast<double>(count) / num_samples;
    outside = 0.5 * frac;
    inside.standard_error = std::hypot(inside.standard_error,
                                       0.5 * std::sqrt(frac * (1 - frac) / num_samples));
  }
  inside.value = std::clamp(inside.value + outside, 0.0, 1.0);
  return inside;
}

const StudyCell& P6Study::cell(const std::string& metric, const std::string& transform) const {
  for (const auto& c : cells)
    if (c.metric == metric && c.transform == transform) return c;
  throw ConfigError("no study cell " + metric + "/" + transform);
}

const P6Verdict& P6Study::verdict(const std::string& metric) const {
  for (const auto& v : verdicts)
    if (v.metric == metric) return v;
  throw ConfigError("no verdict for " + metric);
}

P6Study p6_violation_study(std::uint64_t seed, const P6StudyOptions& opt) {
  const double w = opt.baseline_half_width;
  const std::vector<Map1D> maps = {identity_map(),
                                   reflect_map(),
                                   translate_map(opt.translate_by),
                                   scale_map(opt.scale_factor),
                                   scale_map(opt.support_breaking_scale),
                                   interval_swap_map(opt.relabel_lo, opt.relabel_hi, opt.relabel_cut)};
  const Density1D nu = mixture_density(kStudyMixture);
  const Density1D u = uniform_density(-w, w);

  P6Study study;
  const SpaceConfig space = SpaceConfig::attribution(1, w);
  const SolverConfig solver = SolverConfig::exact_1d();

  for (std::size_t t = 0; t < maps.size(); ++t) {
    const std::string& label = kStudyTransforms[t];
    const Map1D& map = maps[t];

    // WG on samples: each repeat pushes the same draws through the map and
    // scores them against the same baseline draw.
    std::vector<double> values;
    for (int r = 0; r < opt.wg_repeats; ++r) {
      const std::uint64_t run = derive_seed(seed, static_cast<std::uint64_t>(r));
      std::vector<double> xs = gaussian_mixture_1d(derive_seed(run, Stream::Explanations), opt.wg_samples);
      Matrix data(opt.wg_samples, 1);
      for (Index i = 0; i < opt.wg_samples; ++i) data(i, 0) = map.forward(xs[static_cast<std::size_t>(i)]);
      values.push_back(globalness(ExplanationSet(space.kind, std::move(data)), space, solver, run).normalized_wg);
    }
    double mean = 0.0, var = 0.0;
    for (double v : values) mean += v;
    mean /= values.size();
    for (double v : values) var += (v - mean) * (v - mean);
    var = values.size() > 1 ? var / (values.size() - 1) : 0.0;
    study.cells.push_back({"wg", label, mean, std::sqrt(var / values.size()), true});

    const Density1D pushed = pushforward(nu, map);
    const std::uint64_t mc_seed = derive_seed(seed, Stream::Candidates);
    const MCEstimate h = entropy_mc(pushed, opt.mc_samples, mc_seed);
    const MCEstimate kl = kl_mc(pushed, u, opt.mc_samples, mc_seed);
    const MCEstimate tv = tv_mc(pushed, u, opt.mc_samples, mc_seed);
    study.cells.push_back({"entropy", label, h.value, h.standard_error, h.defined});
    study.cells.push_back({"kl", label, kl.value, kl.standard_error, kl.defined});
    study.cells.push_back({"tv", label, tv.value, tv.standard_error, tv.defined});
  }

  auto rel_change = [](const StudyCell& base, const StudyCell& other) {
    const double denom = std::max(std::abs(base.value), 1e-12);
    return std::abs(other.value - base.value) / denom;
  };
  for (const auto& metric : kStudyMetrics) {
    const StudyCell& base = study.cell(metric, "A_original");
    auto invariant = [&](const std::string& tr) {
      const StudyCell& c = study.cell(metric, tr);
      return base.defined && c.defined && rel_change(base, c) <= opt.invariance_tol;
    };
    auto sensitive = [&](const std::string& tr) {
      const StudyCell& c = study.cell(metric, tr);
      return base.defined && c.defined && rel_change(base, c) >= opt.sensitivity_tol;
    };
    P6Verdict v;
    v.metric = metric;
    v.invariant_reflect = invariant("B_reflect");
    v.invariant_translate = invariant("C_translate");
    v.sensitive_scale = sensitive("D_scale");
    v.sensitive_relabel = sensitive("E_relabel");
    v.passes = v.invariant_reflect && v.invariant_translate && v.sensitive_scale && v.sensitive_relabel;
    study.verdicts.push_back(v);
  }
  return study;
}

std::string to_csv(const P6Study& study) {
  std::ostringstream out;
  out.precision(17);
  out << "metric,transform,value,stderr,defined\n";
  for (const auto& c : study.cells) {
    out << c.metric << ',' << c.transform << ',';
    if (c.defined)
      out << c.value << ',' << c.standard_error;
    else
      out << "NA,NA";
    out << ',' << (c.defined ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace wg
