#include "wg/studies.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "wg/baseline.hpp"
#include "wg/errors.hpp"
#include "wg/explainers.hpp"
#include "wg/globalness.hpp"
#include "wg/random.hpp"

namespace wg {
namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

const char* mark(bool ok) { return ok ? "PASS" : "FAIL"; }

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double standard_error_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move " + tmp.string() + " to " + path + ": " + ec.message());
  }
}

const std::vector<std::string>& study_names() {
  static const std::vector<std::string> names = {"figure2", "jagged", "smoothing", "convergence"};
  return names;
}

StudyArtifacts run_study(const std::string& name, std::uint64_t seed) {
  if (name == "figure2") return render_figure2(p6_violation_study(seed));
  if (name == "jagged") return render_jagged(jagged_study(seed));
  if (name == "smoothing") return render_smoothing(smoothing_study(seed));
  if (name == "convergence") return render_convergence(convergence_study(seed));
  throw ConfigError("unknown study '" + name + "' (expected figure2, jagged, smoothing or convergence)");
}

// ---------------------------------------------------------------- figure2

StudyArtifacts render_figure2(const P6Study& study) {
  StudyArtifacts out;
  out.name = "figure2";
  out.csv = to_csv(study);

  json cells = json::array();
  for (const auto& c : study.cells) {
    json j = {{"metric", c.metric}, {"transform", c.transform}, {"defined", c.defined}};
    if (c.defined) {
      j["value"] = c.value;
      j["stderr"] = c.standard_error;
    } else {
      j["value"] = nullptr;
      j["stderr"] = nullptr;
    }
    cells.push_back(j);
  }
  json verdicts = json::array();
  for (const auto& v : study.verdicts)
    verdicts.push_back({{"metric", v.metric},
                        {"invariant_reflect", v.invariant_reflect},
                        {"invariant_translate", v.invariant_translate},
                        {"sensitive_scale", v.sensitive_scale},
                        {"sensitive_relabel", v.sensitive_relabel},
                        {"selective_invariance", v.passes}});

  const P6Verdict& w = study.verdict("wg");
  const P6Verdict& e = study.verdict("entropy");
  const P6Verdict& t = study.verdict("tv");
  const bool kl_undefined = !study.cell("kl", "D_support_break").defined;
  const bool wg_ok = w.invariant_reflect && w.invariant_translate && w.sensitive_scale;
  const bool relabel_blind = !e.sensitive_relabel && !t.sensitive_relabel;
  out.passes = wg_ok && relabel_blind && kl_undefined && w.passes;

  json doc = {{"study", "figure2"},
              {"cells", cells},
              {"verdicts", verdicts},
              {"checks",
               {{"wg_invariant_and_scale_sensitive", wg_ok},
                {"entropy_tv_blind_to_relabel", relabel_blind},
                {"kl_undefined_support_break", kl_undefined}}},
              {"passes", out.passes}};
  out.json = doc.dump(2) + "\n";

  std::ostringstream md;
  md << "# figure2: candidate measures under transformations\n\n| metric |";
  for (const auto& tr : kStudyTransforms) md << ' ' << tr << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < kStudyTransforms.size(); ++i) md << "---|";
  md << '\n';
  for (const auto& m : kStudyMetrics) {
    md << "| " << m << " |";
    for (const auto& tr : kStudyTransforms) {
      const StudyCell& c = study.cell(m, tr);
      md << ' ' << (c.defined ? fixed(c.value) : std::string("undefined")) << " |";
    }
    md << '\n';
  }
  md << "\n| check | result |\n|---|---|\n"
     << "| WG invariant to reflection and translation, sensitive to 0.5 scaling | " << mark(wg_ok) << " |\n"
     << "| entropy and TV unchanged by the measure-preserving relabeling | " << mark(relabel_blind) << " |\n"
     << "| KL undefined when the transformed support leaves the baseline's | " << mark(kl_undefined)
     << " |\n"
     << "| only WG is selectively invariant | " << mark(w.passes && !e.passes && !t.passes) << " |\n";
  out.summary_markdown = md.str();
  return out;
}

// ------------------------------------------------------------------ jagged

JaggedStudy jagged_study(std::uint64_t seed, const JaggedStudyOptions& opt) {
  if (opt.seeds < 1) throw ConfigError("jagged study needs seeds >= 1");
  if (!(opt.epsilon > 0)) throw ConfigError("jagged study needs epsilon > 0");
  JaggedStudy study;
  const std::vector<double> scales = {0.0, opt.epsilon, 2 * opt.epsilon, 4 * opt.epsilon};
  const auto space = SpaceConfig::ranking(2);
  const auto solver = SolverConfig::defaults_for(SpaceKind::Ranking);
  const std::uint64_t data_root = derive_seed(seed, Stream::Dataset);
  const std::uint64_t train_root = derive_seed(seed, Stream::Training);
  const std::uint64_t wg_root = derive_seed(seed, Stream::Baseline);

  for (std::size_t j = 0; j < scales.size(); ++j) {
    for (int r = 0; r < opt.seeds; ++r) {
      JaggedBoundaryConfig cfg;
      cfg.n = opt.n;
      cfg.perturbation_scale = scales[j];
      cfg.seed = derive_seed(data_root, static_cast<std::uint64_t>(r));
      const JaggedBoundaryTask task = jagged_boundary(cfg);

      MlpTrainingConfig tc = opt.training;
      tc.seed = derive_seed(train_root, j * 1000003ULL + static_cast<std::uint64_t>(r));
      const MlpModel model = train(task.points, task.labels, tc);

      const Matrix ig = explain_all(model, task.points, ExplainerSpec::integrated_gradients(opt.ig_steps));
      const Matrix cg = explain_all(model, task.points,
                                    ExplainerSpec::constant_global(fit_constant_global(model, task.points)));
      const Matrix gt = ground_truth_one_hot(task);

      // One baseline draw per run, shared by the three explainers.
      const std::uint64_t run_seed = derive_seed(wg_root, j * 1000003ULL + static_cast<std::uint64_t>(r));
      JaggedRun run;
      run.scale = scales[j];
      run.replicate = r;
      run.train_accuracy = accuracy(model, task.points, task.labels);
      run.accuracy_ig = explainer_accuracy(task, ig);
      run.accuracy_constant = explainer_accuracy(task, cg);
      run.wg_ig = globalness(to_ranking(ig, true), space, solver, run_seed).normalized_wg;
      run.wg_constant = globalness(to_ranking(cg, true), space, solver, run_seed).normalized_wg;
      run.wg_ground_truth = globalness(to_ranking(gt, true), space, solver, run_seed).normalized_wg;
      study.runs.push_back(run);
    }
  }

  study.passes = true;
  for (double s : scales) {
    std::vector<double> aig, acg, wig, wcg, wgt;
    for (const auto& r : study.runs) {
      if (r.scale != s) continue;
      aig.push_back(r.accuracy_ig);
      acg.push_back(r.accuracy_constant);
      wig.push_back(r.wg_ig);
      wcg.push_back(r.wg_constant);
      wgt.push_back(r.wg_ground_truth);
    }
    JaggedScaleSummary sum;
    sum.scale = s;
    sum.accuracy_ig = mean_of(aig);
    sum.accuracy_constant = mean_of(acg);
    sum.wg_ig = mean_of(wig);
    sum.wg_constant = mean_of(wcg);
    sum.wg_ground_truth = mean_of(wgt);
    sum.ig_more_accurate = sum.accuracy_ig > sum.accuracy_constant;
    sum.ig_closer_to_ground_truth =
        std::abs(sum.wg_ig - sum.wg_ground_truth) < std::abs(sum.wg_constant - sum.wg_ground_truth);
    study.passes = study.passes && sum.ig_more_accurate && sum.ig_closer_to_ground_truth;
    study.scales.push_back(sum);
  }
  return study;
}

StudyArtifacts render_jagged(const JaggedStudy& study) {
  StudyArtifacts out;
  out.name = "jagged";
  out.passes = study.passes;

  std::ostringstream csv;
  csv << "scale,replicate,explainer,metric,value\n";
  for (const auto& r : study.runs) {
    const std::string prefix = num(r.scale) + "," + std::to_string(r.replicate) + ",";
    csv << prefix << "model,train_accuracy," << num(r.train_accuracy) << '\n'
        << prefix << "integrated_gradients,accuracy," << num(r.accuracy_ig) << '\n'
        << prefix << "constant_global,accuracy," << num(r.accuracy_constant) << '\n'
        << prefix << "integrated_gradients,wg," << num(r.wg_ig) << '\n'
        << prefix << "constant_global,wg," << num(r.wg_constant) << '\n'
        << prefix << "ground_truth,wg," << num(r.wg_ground_truth) << '\n';
  }
  out.csv = csv.str();

  json runs = json::array();
  for (const auto& r : study.runs)
    runs.push_back({{"scale", r.scale},
                    {"replicate", r.replicate},
                    {"train_accuracy", r.train_accuracy},
                    {"accuracy_ig", r.accuracy_ig},
                    {"accuracy_constant", r.accuracy_constant},
                    {"wg_ig", r.wg_ig},
                    {"wg_constant", r.wg_constant},
                    {"wg_ground_truth", r.wg_ground_truth}});
  json scales = json::array();
  for (const auto& s : study.scales)
    scales.push_back({{"scale", s.scale},
                      {"accuracy_ig", s.accuracy_ig},
                      {"accuracy_constant", s.accuracy_constant},
                      {"wg_ig", s.wg_ig},
                      {"wg_constant", s.wg_constant},
                      {"wg_ground_truth", s.wg_ground_truth},
                      {"ig_more_accurate", s.ig_more_accurate},
                      {"ig_closer_to_ground_truth", s.ig_closer_to_ground_truth}});
  out.json = json({{"study", "jagged"},
                   {"space", "ranking"},
                   {"runs", runs},
                   {"scales", scales},
                   {"passes", study.passes}})
                 .dump(2) +
             "\n";

  std::ostringstream md;
  md << "# jagged: explainer accuracy and globalness against the ground truth\n\n"
     << "| scale | acc IG | acc constant | WG IG | WG constant | WG ground truth | IG more accurate | IG "
        "closer |\n|---|---|---|---|---|---|---|---|\n";
  for (const auto& s : study.scales)
    md << "| " << fixed(s.scale, 2) << " | " << fixed(s.accuracy_ig, 3) << " | " << fixed(s.accuracy_constant, 3)
       << " | " << fixed(s.wg_ig) << " | " << fixed(s.wg_constant) << " | " << fixed(s.wg_ground_truth) << " | "
       << mark(s.ig_more_accurate) << " | " << mark(s.ig_closer_to_ground_truth) << " |\n";
  md << "\noverall: " << mark(study.passes) << '\n';
  out.summary_markdown = md.str();
  return out;
}

// --------------------------------------------------------------- smoothing

SmoothingStudy smoothing_study(std::uint64_t seed, const SmoothingStudyOptions& opt) {
  if (opt.seeds < 2) throw ConfigError("smoothing study needs seeds >= 2 for a standard error");
  if (opt.sigmas.empty()) throw ConfigError("smoothing study needs at least one sigma");
  SmoothingStudy study;
  study.sigmas = opt.sigmas;
  study.wg.assign(opt.sigmas.size(), {});
  const auto solver = SolverConfig::sliced(opt.projections);

  for (int r = 0; r < opt.seeds; ++r) {
    const auto rr = static_cast<std::uint64_t>(r);
    JaggedBoundaryConfig cfg;
    cfg.n = opt.n;
    cfg.seed = derive_seed(derive_seed(seed, Stream::Dataset), rr);
    const JaggedBoundaryTask task = jagged_boundary(cfg);
    MlpTrainingConfig tc = opt.training;
    tc.seed = derive_seed(derive_seed(seed, Stream::Training), rr);
    const MlpModel model = train(task.points, task.labels, tc);

    std::vector<ExplanationSet> sets;
    const std::uint64_t smooth_seed = derive_seed(derive_seed(seed, Stream::Smoothing), rr);
    for (double sigma : opt.sigmas) {
      const auto spec = ExplainerSpec::smooth(ExplainerSpec::saliency(), sigma, opt.num_draws);
      sets.emplace_back(ExplanationKind::attribution(2), explain_all(model, task.points, spec, smooth_seed));
    }
    sets.emplace_back(ExplanationKind::attribution(2),
                      explain_all(model, task.points,
                                  ExplainerSpec::constant_global(fit_constant_global(model, task.points))));
    std::vector<ExplanationSet> centered;
    for (const auto& s : sets) centered.push_back(center(s));
    const double k = estimate_radius_k(centered);
    const auto space = SpaceConfig::attribution(2, k);
    const std::uint64_t wg_seed = derive_seed(derive_seed(seed, Stream::Baseline), rr);
    for (std::size_t i = 0; i < opt.sigmas.size(); ++i)
      study.wg[i].push_back(globalness(sets[i], space, solver, wg_seed).normalized_wg);
    study.wg_constant.push_back(globalness(sets.back(), space, solver, wg_seed).normalized_wg);
  }

  for (const auto& row : study.wg) {
    study.mean.push_back(mean_of(row));
    study.standard_error.push_back(standard_error_of(row));
  }
  study.monotone = true;
  for (std::size_t i = 0; i + 1 < study.wg.size(); ++i) {
    std::vector<double> step;
    for (int r = 0; r < opt.seeds; ++r) step.push_back(study.wg[i + 1][r] - study.wg[i][r]);
    study.step_mean.push_back(mean_of(step));
    study.step_standard_error.push_back(standard_error_of(step));
    if (study.step_mean.back() < -study.step_standard_error.back()) study.monotone = false;
  }
  study.constant_mean = mean_of(study.wg_constant);
  study.constant_pinned = true;
  for (double v : study.wg_constant)
    if (std::abs(v - 1.0) > opt.constant_tolerance) study.constant_pinned = false;
  study.passes = study.monotone && study.constant_pinned;
  return study;
}

StudyArtifacts render_smoothing(const SmoothingStudy& study) {
  StudyArtifacts out;
  out.name = "smoothing";
  out.passes = study.passes;

  std::ostringstream csv;
  csv << "explainer,sigma,replicate,wg\n";
  for (std::size_t i = 0; i < study.sigmas.size(); ++i)
    for (std::size_t r = 0; r < study.wg[i].size(); ++r)
      csv << "smooth_saliency," << num(study.sigmas[i]) << ',' << r << ',' << num(study.wg[i][r]) << '\n';
  for (std::size_t r = 0; r < study.wg_constant.size(); ++r)
    csv << "constant_global,NA," << r << ',' << num(study.wg_constant[r]) << '\n';
  out.csv = csv.str();

  json levels = json::array();
  for (std::size_t i = 0; i < study.sigmas.size(); ++i)
    levels.push_back({{"sigma", study.sigmas[i]},
                      {"wg", study.wg[i]},
                      {"mean", study.mean[i]},
                      {"stderr", study.standard_error[i]}});
  json steps = json::array();
  for (std::size_t i = 0; i < study.step_mean.size(); ++i)
    steps.push_back({{"from_sigma", study.sigmas[i]},
                     {"to_sigma", study.sigmas[i + 1]},
                     {"mean_change", study.step_mean[i]},
                     {"stderr", study.step_standard_error[i]}});
  out.json = json({{"study", "smoothing"},
                   {"levels", levels},
                   {"steps", steps},
                   {"constant_global", {{"wg", study.wg_constant}, {"mean", study.constant_mean}}},
                   {"monotone", study.monotone},
                   {"constant_pinned", study.constant_pinned},
                   {"passes", study.passes}})
                 .dump(2) +
             "\n";

  std::ostringstream md;
  md << "# smoothing: globalness of Smooth(Saliency, sigma)\n\n| sigma | mean WG | stderr |\n|---|---|---|\n";
  for (std::size_t i = 0; i < study.sigmas.size(); ++i)
    md << "| " << short_num(study.sigmas[i]) << " | " << fixed(study.mean[i]) << " | "
       << fixed(study.standard_error[i]) << " |\n";
  md << "| constant global | " << fixed(study.constant_mean) << " | |\n\n"
     << "| check | result |\n|---|---|\n"
     << "| non-decreasing in sigma within one standard error | " << mark(study.monotone) << " |\n"
     << "| constant global explainer at 1.00 +/- 0.03 | " << mark(study.constant_pinned) << " |\n";
  out.summary_markdown = md.str();
  return out;
}

// ------------------------------------------------------------- convergence

double mixture_mean(const std::vector<MixtureComponent>& components) {
  double m = 0.0, w = 0.0;
  for (const auto& c : components) {
    m += c.weight * c.mean;
    w += c.weight;
  }
  return m / w;
}

double mixture_quantile(const std::vector<MixtureComponent>& components, double u) {
  if (!(u > 0.0 && u < 1.0)) throw ConfigError("mixture quantile needs u in (0, 1)");
  double total = 0.0, lo = INFINITY, hi = -INFINITY;
  for (const auto& c : components) {
    total += c.weight;
    lo = std::min(lo, c.mean - 40 * c.sd);
    hi = std::max(hi, c.mean + 40 * c.sd);
  }
  auto cdf = [&](double x) {
    double f = 0.0;
    for (const auto& c : components) f += c.weight * normal_cdf((x - c.mean) / c.sd);
    return f / total;
  };
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double mixture_vs_uniform_wasserstein(const std::vector<MixtureComponent>& components, double half_width,
                                      double p, int nodes) {
  if (!(half_width > 0)) throw ConfigError("uniform half-width must be positive");
  if (nodes < 1) throw ConfigError("quadrature needs at least one node");
  const double shift = mixture_mean(components);
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double u = (i + 0.5) / nodes;
    const double a = mixture_quantile(components, u) - shift;
    const double b = -half_width + 2 * half_width * u;
    acc += std::pow(std::abs(a - b), p);
  }
  return std::pow(acc / nodes, 1.0 / p);
}

namespace {

ConvergenceCurve to_curve(std::string name, const std::vector<ConvergencePoint>& pts, double reference) {
  ConvergenceCurve c;
  c.name = std::move(name);
  c.reference = reference;
  for (const auto& pt : pts) {
    c.n.push_back(pt.n);
    c.deviation.push_back(pt.mean_abs_deviation);
    c.standard_error.push_back(pt.standard_error);
  }
  c.slope = loglog_slope(pts);
  return c;
}

}  // namespace

ConvergenceCurve mixture_convergence_curve(std::uint64_t seed, const std::vector<Index>& n_list, int repeats) {
  constexpr double kHalfWidth = 30.0;
  const double reference = mixture_vs_uniform_wasserstein(kStudyMixture, kHalfWidth, 2.0, 20000);
  const SetSampler sampler = [](Index n, std::uint64_t s) {
    const std::vector<double> xs = gaussian_mixture_1d(s, n);
    Matrix m(n, 1);
    for (Index i = 0; i < n; ++i) m(i, 0) = xs[static_cast<std::size_t>(i)];
    return ExplanationSet(ExplanationKind::attribution(1), std::move(m));
  };
  const auto pts = convergence_curve(sampler, SpaceConfig::attribution(1, kHalfWidth), SolverConfig::exact_1d(),
                                     n_list, repeats, seed, reference);
  return to_curve("mixture_1d_exact", pts, reference);
}

ConvergenceStudy convergence_study(std::uint64_t seed, const ConvergenceStudyOptions& opt) {
  ConvergenceStudy study;
  study.curves.push_back(
      mixture_convergence_curve(derive_seed(seed, Stream::Explanations), opt.n_list, opt.repeats));

  const auto space = SpaceConfig::attribution(2, 1.0);
  const SetSampler from_baseline = [](Index n, std::uint64_t s) {
    return sample_baseline(BaselineSpec::ball(2, 1.0, s), n);
  };
  const auto pts = convergence_curve(from_baseline, space, SolverConfig::sliced(opt.projections), opt.n_list,
                                     opt.repeats, derive_seed(seed, Stream::Baseline), 0.0);
  study.curves.push_back(to_curve("ball_2d_sliced_self", pts, 0.0));

  study.passes = true;
  for (const auto& c : study.curves) study.passes = study.passes && c.slope < 0.0;
  return study;
}

StudyArtifacts render_convergence(const ConvergenceStudy& study) {
  StudyArtifacts out;
  out.name = "convergence";
  out.passes = study.passes;
  std::ostringstream csv;
  csv << "curve,n,deviation,stderr\n";
  json curves = json::array();
  for (const auto& c : study.curves) {
    for (std::size_t i = 0; i < c.n.size(); ++i)
      csv << c.name << ',' << c.n[i] << ',' << num(c.deviation[i]) << ',' << num(c.standard_error[i]) << '\n';
    curves.push_back({{"name", c.name},
                      {"n", c.n},
                      {"deviation", c.deviation},
                      {"stderr", c.standard_error},
                      {"reference", c.reference},
                      {"loglog_slope", c.slope}});
  }
  out.csv = csv.str();
  out.json = json({{"study", "convergence"}, {"curves", curves}, {"passes", study.passes}}).dump(2) + "\n";

  std::ostringstream md;
  md << "# convergence: deviation from the population value against N\n\n"
     << "| curve | reference | log-log slope | negative |\n|---|---|---|---|\n";
  for (const auto& c : study.curves)
    md << "| " << c.name << " | " << fixed(c.reference) << " | " << fixed(c.slope, 3) << " | "
       << mark(c.slope < 0) << " |\n";
  out.summary_markdown = md.str();
  return out;
}

}  // namespace wg
