#include "wg/axioms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"
#include "wg/baseline.hpp"
#include "wg/candidates.hpp"
#include "wg/errors.hpp"
#include "wg/globalness.hpp"
#include "wg/random.hpp"
#include "wg/studies.hpp"
#include "wg/synth.hpp"

namespace wg {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Axis-aligned Gaussian blob around `center` with per-axis spreads.
Matrix gaussian_blob(Index n, const Vector& center, const Vector& sd, Rng& rng) {
  std::normal_distribution<double> nd;
  Matrix m(n, center.size());
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < center.size(); ++j) m(i, j) = center(j) + sd(j) * nd(rng);
  return m;
}

// A random explanation law of one of the three kinds. Attribution draws
// come from Gaussian blobs, boxes or blob pairs whose spread keeps mass away
// from the radius-k boundary.
ExplanationSet fuzz_set(int family, int s, Index n, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  switch (family % 5) {
    case 0: {
      Vector c = Vector::Zero(s), sd(s);
      for (int j = 0; j < s; ++j) sd(j) = 0.1 + 2.0 * unit(rng);
      return {ExplanationKind::attribution(s), gaussian_blob(n, c, sd, rng)};
    }
    case 1: {
      Matrix m(n, s);
      Vector half(s);
      for (int j = 0; j < s; ++j) half(j) = 0.2 + 2.0 * unit(rng);
      for (Index i = 0; i < n; ++i)
        for (int j = 0; j < s; ++j) m(i, j) = half(j) * (2 * unit(rng) - 1);
      return {ExplanationKind::attribution(s), std::move(m)};
    }
    case 2: {
      Vector c(s), sd(s);
      for (int j = 0; j < s; ++j) {
        c(j) = 1.5 * (2 * unit(rng) - 1);
        sd(j) = 0.5 + unit(rng);
      }
      Matrix a = gaussian_blob(n / 2, c, sd, rng);
      Matrix b = gaussian_blob(n - n / 2, -c, sd, rng);
      Matrix m(n, s);
      m << a, b;
      return {ExplanationKind::attribution(s), std::move(m)};
    }
    case 3: {
      Matrix m(n, s);
      std::vector<double> q(static_cast<std::size_t>(s));
      for (auto& v : q) v = unit(rng);
      for (Index i = 0; i < n; ++i)
        for (int j = 0; j < s; ++j) m(i, j) = unit(rng) < q[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
      return {ExplanationKind::selection(s), std::move(m)};
    }
    default: {
      // Permutations a random number of adjacent swaps from a random centre.
      std::vector<int> centre(static_cast<std::size_t>(s));
      std::iota(centre.begin(), centre.end(), 0);
      std::shuffle(centre.begin(), centre.end(), rng);
      const int swaps = static_cast<int>(unit(rng) * s * s);
      std::uniform_int_distribution<int> pos(0, s - 2);
      Matrix m(n, s);
      for (Index i = 0; i < n; ++i) {
        std::vector<int> perm = centre;
        for (int t = 0; t < swaps; ++t) {
          const int k = pos(rng);
          std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(k) + 1]);
        }
        for (int j = 0; j < s; ++j) m(i, j) = perm[static_cast<std::size_t>(j)];
      }
      return {ExplanationKind::ranking(s), std::move(m)};
    }
  }
}

SpaceConfig space_for(const ExplanationSet& set) {
  switch (set.kind().space) {
    case SpaceKind::Attribution: {
      const ExplanationSet c = center(set);
      const double k = estimate_radius_k(std::span<const ExplanationSet>(&c, 1));
      return SpaceConfig::attribution(static_cast<int>(set.dim()), k);
    }
    case SpaceKind::Selection:
      return SpaceConfig::selection(static_cast<int>(set.dim()));
    case SpaceKind::Ranking:
      return SpaceConfig::ranking(static_cast<int>(set.dim()));
  }
  throw ConfigError("unknown explanation space");
}

SolverConfig fuzz_solver(const ExplanationSet& set) {
  return set.kind().space == SpaceKind::Attribution ? SolverConfig::sliced(500)
                                                     : SolverConfig::defaults_for(set.kind().space);
}

// Discrete spaces have few atoms, so large N is cheap; it keeps the relative
// noise of the shared-draw normalizer near 1/sqrt(N).
Index fuzz_size(int family, Index attribution_n) { return family % 5 >= 3 ? 100000 : attribution_n; }

double relative_change(double value, double reference) { return std::abs(value / reference - 1.0); }

}  // namespace

const AxiomCheck& AxiomSuite::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw ConfigError("no axiom check named " + name);
}

AxiomCheck check_non_negativity(const AxiomOptions& opt) {
  AxiomCheck out{"P1", "non-negativity", true, INFINITY, 0.0, ""};
  Rng rng(derive_seed(opt.seed, Stream::Explanations) ^ 0x01);
  std::uniform_int_distribution<int> dim(2, 5);
  for (int c = 0; c < opt.fuzz_cases; ++c) {
    const ExplanationSet set = fuzz_set(c, dim(rng), 64, rng);
    const auto r = globalness(set, space_for(set), fuzz_solver(set), derive_seed(opt.seed, c));
    out.measured = std::min({out.measured, r.raw_wg, r.normalized_wg});
  }
  out.passed = out.measured >= 0.0;
  out.detail = "smallest raw or normalized value over " + std::to_string(opt.fuzz_cases) +
               " fuzzed sets: " + fmt(out.measured);
  return out;
}

AxiomCheck check_continuity(const AxiomOptions& opt) {
  AxiomCheck out{"P2", "continuity (convergence in N)", false, 0.0, 0.0, ""};
  const std::vector<Index> n_list = {50, 100, 200, 400, 800, 1600, 3200};
  const ConvergenceCurve curve = mixture_convergence_curve(derive_seed(opt.seed, Stream::Explanations), n_list, 20);
  out.measured = curve.slope;
  out.passed = curve.slope < 0.0 && curve.deviation.back() < curve.deviation.front();
  out.detail = "log-log slope of |estimate - population value| against N: " + fmt(curve.slope) +
               "; deviation " + fmt(curve.deviation.front()) + " at N=50, " + fmt(curve.deviation.back()) +
               " at N=3200";
  return out;
}

AxiomCheck check_convexity(const AxiomOptions& opt) {
  AxiomCheck out{"P3", "convexity", true, INFINITY, 0.0, ""};
  const Index n = opt.convexity_samples;
  const auto solver = SolverConfig::sliced(500);
  Rng pick(derive_seed(opt.seed, Stream::Explanations) ^ 0x03);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::ostringstream detail;
  double worst_margin = INFINITY;

  for (int pair = 0; pair < opt.convexity_pairs; ++pair) {
    Vector cp(2), cq(2), sp(2), sq(2);
    for (int j = 0; j < 2; ++j) {
      cp(j) = 4 * unit(pick) - 2;
      cq(j) = 4 * unit(pick) - 2;
      sp(j) = 0.2 + 1.3 * unit(pick);
      sq(j) = 0.2 + 1.3 * unit(pick);
    }
    for (double lambda : {0.25, 0.5, 0.75}) {
      const auto np = static_cast<Index>(std::lround(lambda * static_cast<double>(n)));
      std::vector<double> gaps;
      for (int r = 0; r < opt.convexity_repeats; ++r) {
        Rng rng(derive_seed(derive_seed(opt.seed, static_cast<std::uint64_t>(pair * 100 + r)),
                            static_cast<std::uint64_t>(lambda * 1000)));
        const ExplanationSet p(ExplanationKind::attribution(2), gaussian_blob(n, cp, sp, rng));
        const ExplanationSet q(ExplanationKind::attribution(2), gaussian_blob(n, cq, sq, rng));
        Matrix mixed(n, 2);
        mixed << p.data().topRows(np), q.data().topRows(n - np);
        const ExplanationSet mix(ExplanationKind::attribution(2), std::move(mixed));
        const std::vector<ExplanationSet> centered = {center(p), center(q), center(mix)};
        const auto space = SpaceConfig::attribution(2, estimate_radius_k(centered));
        const std::uint64_t s = derive_seed(opt.seed, static_cast<std::uint64_t>(1000 + pair * 100 + r));
        const double gp = wg_raw(p, space, solver, s).distance;
        const double gq = wg_raw(q, space, solver, s).distance;
        const double gm = wg_raw(mix, space, solver, s).distance;
        gaps.push_back(lambda * gp + (1 - lambda) * gq - gm);
      }
      const double m = std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size());
      double ss = 0.0;
      for (double g : gaps) ss += (g - m) * (g - m);
      const double se = std::sqrt(ss / static_cast<double>(gaps.size() - 1) / static_cast<double>(gaps.size()));
      // margin >= 0 means the mixture is within the allowed slack
      const double margin = m + opt.convexity_sigmas * se;
      worst_margin = std::min(worst_margin, margin);
      if (margin < 0) {
        out.passed = false;
        detail << "pair " << pair << " lambda " << lambda << ": mean gap " << fmt(m) << " (se " << fmt(se)
               << "); ";
      }
    }
  }
  out.measured = worst_margin;
  detail << "smallest (chord - mixture + " << fmt(opt.convexity_sigmas) << " se): " << fmt(worst_margin);
  out.detail = detail.str();
  return out;
}

AxiomCheck check_fully_local(const AxiomOptions& opt) {
  AxiomCheck out{"P4", "fully-local measure", false, 0.0, opt.local_tolerance, ""};
  const auto space = SpaceConfig::attribution(2, 1.0);
  const ExplanationSet draws =
      sample_baseline(BaselineSpec::ball(2, 1.0, derive_seed(opt.seed, Stream::Explanations)), opt.local_samples);
  const auto r = globalness(draws, space, SolverConfig::sliced(500), opt.seed);
  out.measured = r.normalized_wg;
  out.passed = r.normalized_wg <= opt.local_tolerance;
  out.detail = "normalized WG of " + std::to_string(opt.local_samples) +
               " draws from the radius-1 disk baseline: " + fmt(r.normalized_wg);
  return out;
}

AxiomCheck check_fully_global(const AxiomOptions& opt) {
  AxiomCheck out{"P5", "fully-global measure", false, -INFINITY, 1.0 + opt.global_slack, ""};
  Rng rng(derive_seed(opt.seed, Stream::Explanations) ^ 0x05);
  std::uniform_int_distribution<int> dim(2, 4);
  int worst = -1;
  for (int c = 0; c < opt.fuzz_cases; ++c) {
    const ExplanationSet set = fuzz_set(c, dim(rng), fuzz_size(c, 500), rng);
    const double v = globalness(set, space_for(set), fuzz_solver(set), derive_seed(opt.seed, c)).normalized_wg;
    if (v > out.measured) {
      out.measured = v;
      worst = c;
    }
  }
  out.passed = out.measured <= out.threshold;
  out.detail = "largest normalized WG over " + std::to_string(opt.fuzz_cases) + " fuzzed sets: " +
               fmt(out.measured) + " (case " + std::to_string(worst) + ")";
  return out;
}

AxiomCheck check_selective_invariance(const AxiomOptions& opt) {
  AxiomCheck out{"P6", "selective invariance to transformations", true, 0.0, opt.invariance_tolerance, ""};
  std::ostringstream detail;
  const std::string& measure = opt.measure;
  if (measure != "wg" && measure != "entropy" && measure != "kl" && measure != "tv")
    throw ConfigError("unknown measure '" + measure + "' (expected wg, entropy, kl or tv)");

  if (measure == "wg") {
    // Two offset anisotropic blobs: spread out, not rotationally symmetric.
    Rng rng(derive_seed(opt.seed, Stream::Explanations) ^ 0x06);
    std::normal_distribution<double> nd;
    const Index n = opt.isometry_samples;
    Matrix m(n, 2);
    for (Index i = 0; i < n; ++i) {
      const double c = (i % 2) ? 1.5 : -1.0;
      m(i, 0) = c + 0.8 * nd(rng);
      m(i, 1) = 0.5 * c + 1.2 * nd(rng);
    }
    const ExplanationSet x(ExplanationKind::attribution(2), std::move(m));
    const ExplanationSet xc = center(x);
    const auto space = SpaceConfig::attribution(2, estimate_radius_k(std::span<const ExplanationSet>(&xc, 1)));
    const auto solver = SolverConfig::sliced(opt.isometry_projections);
    const double base = globalness(x, space, solver, opt.seed).normalized_wg;
    Vector shift(2);
    shift << 3.0, -2.0;
    const std::vector<std::pair<std::string, TransformSpec>> isometries = {
        {"rotate", Rotate{0.7}}, {"reflect", Reflect{0}}, {"translate", Translate{shift}}};
    double drift = 0.0;
    for (const auto& [name, t] : isometries) {
      const double d = relative_change(globalness(apply_transform(x, t), space, solver, opt.seed).normalized_wg, base);
      drift = std::max(drift, d);
      detail << name << " drift " << fmt(d) << "; ";
    }
    const double scale_change =
        relative_change(globalness(apply_transform(x, Scale{0.5}), space, solver, opt.seed).normalized_wg, base);
    detail << "scale 0.5 change " << fmt(scale_change) << "; ";
    out.measured = drift;
    if (drift > opt.invariance_tolerance) out.passed = false;
    if (scale_change < opt.sensitivity_tolerance) out.passed = false;
  }

  P6StudyOptions so;
  so.invariance_tol = opt.invariance_tolerance;
  so.sensitivity_tol = opt.sensitivity_tolerance;
  const P6Study study = p6_violation_study(derive_seed(opt.seed, Stream::Candidates), so);
  const P6Verdict& v = study.verdict(measure);
  detail << "1-D study for " << measure << ": reflect " << (v.invariant_reflect ? "invariant" : "changed")
         << ", translate " << (v.invariant_translate ? "invariant" : "changed") << ", scale "
         << (v.sensitive_scale ? "sensitive" : "insensitive") << ", relabel "
         << (v.sensitive_relabel ? "sensitive" : "insensitive");
  if (!v.passes) out.passed = false;
  out.detail = detail.str();
  return out;
}

AxiomSuite run_axiom_suite(const AxiomOptions& opt) {
  AxiomSuite suite;
  suite.options = opt;
  suite.checks = {check_non_negativity(opt), check_continuity(opt),  check_convexity(opt),
                  check_fully_local(opt),    check_fully_global(opt), check_selective_invariance(opt)};
  suite.passes = std::all_of(suite.checks.begin(), suite.checks.end(), [](const auto& c) { return c.passed; });
  return suite;
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

std::string to_junit_xml(const AxiomSuite& suite) {
  const auto failures = std::count_if(suite.checks.begin(), suite.checks.end(), [](const auto& c) { return !c.passed; });
  std::ostringstream x;
  x << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<testsuite name=\"axioms\" tests=\"" << suite.checks.size() << "\" failures=\"" << failures << "\">\n"
    << "  <properties>\n"
    << "    <property name=\"seed\" value=\"" << suite.options.seed << "\"/>\n"
    << "    <property name=\"measure\" value=\"" << xml_escape(suite.options.measure) << "\"/>\n"
    << "  </properties>\n";
  for (const auto& c : suite.checks) {
    x << "  <testcase classname=\"axioms\" name=\"" << c.name << " " << xml_escape(c.title) << "\"";
    if (c.passed) {
      x << ">\n    <system-out>" << xml_escape(c.detail) << "</system-out>\n  </testcase>\n";
    } else {
      x << ">\n    <failure message=\"" << xml_escape(c.detail) << "\"/>\n  </testcase>\n";
    }
  }
  x << "</testsuite>\n";
  return x.str();
}

std::string to_json(const AxiomSuite& suite) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : suite.checks)
    checks.push_back({{"name", c.name},
                      {"title", c.title},
                      {"passed", c.passed},
                      {"measured", std::isfinite(c.measured) ? nlohmann::json(c.measured) : nlohmann::json()},
                      {"threshold", c.threshold},
                      {"detail", c.detail}});
  const auto& o = suite.options;
  nlohmann::json doc = {{"seed", o.seed},
                        {"measure", o.measure},
                        {"tolerances",
                         {{"invariance", o.invariance_tolerance},
                          {"sensitivity", o.sensitivity_tolerance},
                          {"local", o.local_tolerance},
                          {"global_slack", o.global_slack},
                          {"convexity_sigmas", o.convexity_sigmas}}},
                        {"checks", checks},
                        {"passes", suite.passes}};
  return doc.dump(2) + "\n";
}

}  // namespace wg
