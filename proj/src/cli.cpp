#include "wg/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wg/axioms.hpp"
#include "wg/baseline.hpp"
#include "wg/errors.hpp"
#include "wg/explainers.hpp"
#include "wg/explanation_file.hpp"
#include "wg/globalness.hpp"
#include "wg/random.hpp"
#include "wg/studies.hpp"
#include "wg/synth.hpp"

namespace wg {
namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct InputFile {
  std::string path;
  std::string digest;
  ExplanationFile file;
};

InputFile load_input(const std::string& path) {
  const std::string text = read_text_file(path);
  return {path, sha256_hex(text), parse_explanation_file(text, path)};
}

json describe_space(const SpaceConfig& space) {
  json j = {{"kind", std::string(to_string(space.kind.space))},
            {"s", space.kind.dim},
            {"metric", std::string(to_string(space.distance.metric))},
            {"p", space.distance.p},
            {"centering", space.centering}};
  std::visit(
      [&](const auto& shape) {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, UniformBall>)
          j["baseline"] = {{"shape", "ball"}, {"radius", shape.radius}};
        else if constexpr (std::is_same_v<T, UniformHypercube>)
          j["baseline"] = {{"shape", "hypercube"}};
        else
          j["baseline"] = {{"shape", "permutations"}};
      },
      space.baseline.shape);
  return j;
}

json describe_solver(const SolverConfig& solver) {
  json j = {{"method", solver.name()}};
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SinkhornParams>) {
          j["lambda"] = m.lambda;
          j["max_iter"] = m.max_iter;
          j["tol"] = m.tol;
        } else if constexpr (std::is_same_v<T, SlicedParams>) {
          j["projections"] = m.num_projections;
        }
      },
      solver.method);
  return j;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty())
    out << text;
  else
    write_file_atomic(path, text);
}

// ------------------------------------------------------------ scoring flags

struct ScoreFlags {
  std::vector<std::string> files;
  std::string space;
  std::string metric;
  std::optional<double> p;
  std::string solver;
  int projections = 500;
  double lambda = 100.0;
  int max_iter = 10000;
  double tol = 1e-6;
  long n_samples = 0;
  std::optional<double> k;
  std::string out;
  std::string csv;
  std::string manifest;
};

void add_score_flags(CLI::App* cmd, ScoreFlags& f) {
  cmd->add_option("files", f.files, "explanation files")->required();
  cmd->add_option("--space", f.space, "attribution | selection | ranking (defaults to the file's kind)");
  cmd->add_option("--metric", f.metric, "euclidean | hamming | kendalltau (defaults by space)");
  cmd->add_option("--p", f.p, "Wasserstein order (defaults by metric)");
  cmd->add_option("--solver", f.solver, "sliced | sinkhorn | exact (defaults by space)");
  cmd->add_option("--projections", f.projections, "sliced projections")->check(CLI::PositiveNumber);
  cmd->add_option("--lambda", f.lambda, "Sinkhorn sharpness: epsilon = max cost / lambda");
  cmd->add_option("--max-iter", f.max_iter, "Sinkhorn iteration cap")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", f.tol, "Sinkhorn L1 marginal tolerance");
  cmd->add_option("--n-samples", f.n_samples, "subsample this many rows per file (0 = all)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--k", f.k, "baseline radius, overriding the estimate from the inputs");
  cmd->add_option("--out", f.out, "write the JSON report here instead of stdout");
  cmd->add_option("--manifest", f.manifest, "also write the run manifest here");
}

std::vector<std::string> canonical_score_args(const std::string& command, const ScoreFlags& f,
                                              const SpaceConfig& space, const SolverConfig& solver,
                                              std::uint64_t seed) {
  std::vector<std::string> a = {command};
  a.insert(a.end(), f.files.begin(), f.files.end());
  a.insert(a.end(), {"--space", std::string(to_string(space.kind.space)), "--metric",
                     std::string(to_string(space.distance.metric)), "--p", num(space.distance.p), "--solver"});
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SinkhornParams>)
          a.insert(a.end(), {"sinkhorn", "--lambda", num(m.lambda), "--max-iter", std::to_string(m.max_iter),
                             "--tol", num(m.tol)});
        else if constexpr (std::is_same_v<T, SlicedParams>)
          a.insert(a.end(), {"sliced", "--projections", std::to_string(m.num_projections)});
        else
          a.push_back("exact");
      },
      solver.method);
  a.insert(a.end(), {"--n-samples", std::to_string(f.n_samples), "--seed", std::to_string(seed)});
  if (f.k) a.insert(a.end(), {"--k", num(*f.k)});
  return a;
}

ExplanationSet subsample(const ExplanationSet& set, long n, std::uint64_t seed) {
  if (n == 0 || n == set.size()) return set;
  if (n > set.size())
    throw ConfigError("--n-samples " + std::to_string(n) + " exceeds the " + std::to_string(set.size()) +
                      " rows available");
  std::vector<Index> idx(static_cast<std::size_t>(set.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  Rng rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<std::size_t>(n));
  std::sort(idx.begin(), idx.end());
  Matrix m(n, set.dim());
  for (long i = 0; i < n; ++i) m.row(i) = set.data().row(idx[static_cast<std::size_t>(i)]);
  return {set.kind(), std::move(m)};
}

// Largest centered row norm over the inputs. When every input is a point mass the
// centered radius is zero; the raw radius is used then, which cannot change
// a normalized value of exactly one.
double shared_radius(const std::vector<ExplanationSet>& sets) {
  std::vector<ExplanationSet> centered;
  for (const auto& s : sets) centered.push_back(center(s));
  try {
    return estimate_radius_k(centered);
  } catch (const ConfigError&) {
  }
  try {
    return estimate_radius_k(sets);
  } catch (const ConfigError& e) {
    throw ValidationError({{std::nullopt, std::string(e.what()) + "; pass --k to set the baseline radius"}});
  }
}

int run_scoring(const std::string& command, const ScoreFlags& f, std::uint64_t seed, std::ostream& out) {
  std::vector<InputFile> inputs;
  for (const auto& path : f.files) inputs.push_back(load_input(path));

  const ExplanationKind kind = inputs.front().file.set.kind();
  std::vector<Violation> mixed;
  for (const auto& in : inputs)
    if (!(in.file.set.kind() == kind))
      mixed.push_back({std::nullopt, in.path + " is " + std::string(to_string(in.file.set.kind().space)) +
                                         " with s=" + std::to_string(in.file.set.dim()) + ", expected " +
                                         std::string(to_string(kind.space)) + " with s=" +
                                         std::to_string(kind.dim)});
  if (!f.space.empty() && parse_space_kind(f.space) != kind.space)
    mixed.push_back({std::nullopt, "--space " + f.space + " does not match the files' kind " +
                                       std::string(to_string(kind.space))});
  if (!mixed.empty()) throw ValidationError(std::move(mixed));

  std::vector<ExplanationSet> sets;
  for (std::size_t i = 0; i < inputs.size(); ++i)
    sets.push_back(subsample(inputs[i].file.set, f.n_samples,
                             derive_seed(derive_seed(seed, Stream::Explanations), i)));

  SpaceConfig space;
  switch (kind.space) {
    case SpaceKind::Attribution: {
      const double k = f.k ? *f.k : shared_radius(sets);
      space = SpaceConfig::attribution(kind.dim, k);
      break;
    }
    case SpaceKind::Selection:
      if (f.k) throw ConfigError("--k applies to attribution files only");
      space = SpaceConfig::selection(kind.dim);
      break;
    case SpaceKind::Ranking:
      if (f.k) throw ConfigError("--k applies to attribution files only");
      space = SpaceConfig::ranking(kind.dim);
      break;
  }
  if (!f.metric.empty()) space.distance = {parse_metric(f.metric), DistanceSpec::defaults_for(kind.space).p};
  if (f.p) space.distance.p = *f.p;
  if (!(space.distance.p >= 1.0)) throw ConfigError("--p must be >= 1");
  space.validate();

  SolverConfig solver = SolverConfig::defaults_for(kind.space);
  if (f.solver == "sliced")
    solver = SolverConfig::sliced(f.projections);
  else if (f.solver == "sinkhorn")
    solver = SolverConfig::sinkhorn(f.lambda, f.max_iter, f.tol);
  else if (f.solver == "exact")
    solver = SolverConfig::exact();
  else if (!f.solver.empty())
    throw ConfigError("unknown solver '" + f.solver + "' (expected sliced, sinkhorn or exact)");
  else if (std::holds_alternative<SlicedParams>(solver.method))
    solver = SolverConfig::sliced(f.projections);
  else if (std::holds_alternative<SinkhornParams>(solver.method))
    solver = SolverConfig::sinkhorn(f.lambda, f.max_iter, f.tol);
  check_solver(solver);

  json results = json::array();
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const GlobalnessReport r = globalness(sets[i], space, solver, seed);
    results.push_back({{"file", inputs[i].path},
                       {"n", r.n},
                       {"raw_wg", r.raw_wg},
                       {"dirac_normalizer", r.dirac_normalizer},
                       {"normalized_wg", r.normalized_wg},
                       {"converged", r.converged},
                       {"iterations_used", r.iterations_used}});
    order.emplace_back(r.normalized_wg, i);
  }

  json inputs_json = json::array();
  for (const auto& in : inputs) inputs_json.push_back({{"path", in.path}, {"sha256", in.digest}});
  const json manifest = {{"tool", kToolName},
                         {"version", kToolVersion},
                         {"command", command},
                         {"args", canonical_score_args(command, f, space, solver, seed)},
                         {"seed", seed},
                         {"space", describe_space(space)},
                         {"solver", describe_solver(solver)},
                         {"inputs", inputs_json}};

  json report = {{"command", command}, {"manifest", manifest}, {"space", describe_space(space)},
                 {"solver", describe_solver(solver)}};
  if (command == "compare") {
    std::stable_sort(order.begin(), order.end());
    json ranked = json::array();
    std::ostringstream csv;
    csv << "rank,file,n,raw_wg,dirac_normalizer,normalized_wg,converged\n";
    int rank = 1;
    for (const auto& [value, i] : order) {
      json r = results[i];
      r["rank"] = rank;
      ranked.push_back(r);
      csv << rank << ',' << inputs[i].path << ',' << r["n"].get<long>() << ',' << num(r["raw_wg"].get<double>())
          << ',' << num(r["dirac_normalizer"].get<double>()) << ',' << num(value) << ','
          << (r["converged"].get<bool>() ? "true" : "false") << '\n';
      ++rank;
    }
    report["reports"] = ranked;
    if (!f.csv.empty()) write_file_atomic(f.csv, csv.str());
  } else {
    report["reports"] = results;
  }
  emit(report.dump(2) + "\n", f.out, out);
  if (!f.manifest.empty()) write_file_atomic(f.manifest, manifest.dump(2) + "\n");
  return kExitOk;
}

// ------------------------------------------------------------------ generate

Matrix explain_jagged(const std::string& explainer, const JaggedBoundaryTask& task, const MlpModel& model,
                      double sigma, int draws, int steps, std::uint64_t seed) {
  if (explainer == "saliency") return explain_all(model, task.points, ExplainerSpec::saliency());
  if (explainer == "input_x_gradient") return explain_all(model, task.points, ExplainerSpec::input_x_gradient());
  if (explainer == "integrated_gradients")
    return explain_all(model, task.points, ExplainerSpec::integrated_gradients(steps));
  if (explainer == "smooth_saliency")
    return explain_all(model, task.points, ExplainerSpec::smooth(ExplainerSpec::saliency(), sigma, draws), seed);
  if (explainer == "constant_global")
    return explain_all(model, task.points, ExplainerSpec::constant_global(fit_constant_global(model, task.points)));
  if (explainer == "ground_truth") return ground_truth_one_hot(task);
  throw ConfigError("unknown explainer '" + explainer +
                    "' (expected saliency, input_x_gradient, integrated_gradients, smooth_saliency, "
                    "constant_global or ground_truth)");
}

struct GenerateFlags {
  std::string what;
  long n = 1000;
  double scale = 0.0;
  std::string space = "attribution";
  int s = 2;
  double radius = 1.0;
  std::string explainer = "integrated_gradients";
  std::string as = "attribution";
  double sigma = 0.0;
  int draws = 500;
  int steps = 64;
  int epochs = 60;
  std::string out;
  std::string manifest;
};

std::vector<std::string> canonical_generate_args(const GenerateFlags& g, std::uint64_t seed) {
  std::vector<std::string> a = {"generate", g.what, "--n", std::to_string(g.n)};
  if (g.what == "jagged") a.insert(a.end(), {"--scale", num(g.scale)});
  if (g.what == "baseline")
    a.insert(a.end(), {"--space", g.space, "--s", std::to_string(g.s), "--radius", num(g.radius)});
  if (g.what == "explanations")
    a.insert(a.end(), {"--scale", num(g.scale), "--explainer", g.explainer, "--as", g.as, "--sigma", num(g.sigma),
                       "--draws", std::to_string(g.draws), "--steps", std::to_string(g.steps), "--epochs",
                       std::to_string(g.epochs)});
  a.insert(a.end(), {"--seed", std::to_string(seed)});
  return a;
}

int run_generate(const GenerateFlags& g, std::uint64_t seed, std::ostream& out) {
  if (g.n < 1) throw ConfigError("--n must be >= 1");
  std::string text;
  const std::map<std::string, std::string> meta = {{"generator", g.what}, {"seed", std::to_string(seed)}};
  if (g.what == "jagged") {
    JaggedBoundaryConfig cfg;
    cfg.n = g.n;
    cfg.perturbation_scale = g.scale;
    cfg.seed = seed;
    const JaggedBoundaryTask task = jagged_boundary(cfg);
    std::ostringstream csv;
    csv << "x0,x1,label,clean_label,cluster,ground_truth_feature\n";
    for (Index i = 0; i < task.points.rows(); ++i) {
      const auto u = static_cast<std::size_t>(i);
      csv << num(task.points(i, 0)) << ',' << num(task.points(i, 1)) << ',' << task.labels[u] << ','
          << task.clean_labels[u] << ',' << task.cluster[u] << ',' << task.ground_truth_feature[u] << '\n';
    }
    text = csv.str();
  } else if (g.what == "mixture") {
    const std::vector<double> xs = gaussian_mixture_1d(derive_seed(seed, Stream::Explanations), g.n);
    Matrix m(g.n, 1);
    for (long i = 0; i < g.n; ++i) m(i, 0) = xs[static_cast<std::size_t>(i)];
    text = format_explanation_file({ExplanationSet(ExplanationKind::attribution(1), std::move(m)), meta});
  } else if (g.what == "baseline") {
    const SpaceKind kind = parse_space_kind(g.space);
    const std::uint64_t s = derive_seed(seed, Stream::Explanations);
    const BaselineSpec spec = kind == SpaceKind::Attribution ? BaselineSpec::ball(g.s, g.radius, s)
                              : kind == SpaceKind::Selection ? BaselineSpec::hypercube(g.s, s)
                                                             : BaselineSpec::permutations(g.s, s);
    text = format_explanation_file({sample_baseline(spec, g.n), meta});
  } else if (g.what == "explanations") {
    JaggedBoundaryConfig cfg;
    cfg.n = g.n;
    cfg.perturbation_scale = g.scale;
    cfg.seed = derive_seed(seed, Stream::Dataset);
    const JaggedBoundaryTask task = jagged_boundary(cfg);
    MlpTrainingConfig tc;
    tc.epochs = g.epochs;
    tc.seed = derive_seed(seed, Stream::Training);
    const MlpModel model = train(task.points, task.labels, tc);
    const Matrix e = explain_jagged(g.explainer, task, model, g.sigma, g.draws, g.steps,
                                    derive_seed(seed, Stream::Smoothing));
    std::map<std::string, std::string> m = meta;
    m["explainer"] = g.explainer;
    m["perturbation_scale"] = num(g.scale);
    if (g.as == "attribution")
      text = format_explanation_file({ExplanationSet(ExplanationKind::attribution(2), e), m});
    else if (g.as == "ranking")
      text = format_explanation_file({to_ranking(e, true), m});
    else
      throw ConfigError("--as must be attribution or ranking");
  } else {
    throw ConfigError("unknown generator '" + g.what + "' (expected jagged, mixture, baseline or explanations)");
  }
  emit(text, g.out, out);
  if (!g.manifest.empty()) {
    const json manifest = {{"tool", kToolName},
                           {"version", kToolVersion},
                           {"command", "generate"},
                           {"args", canonical_generate_args(g, seed)},
                           {"seed", seed},
                           {"inputs", json::array()}};
    write_file_atomic(g.manifest, manifest.dump(2) + "\n");
  }
  return kExitOk;
}

// -------------------------------------------------------------------- seeds

std::uint64_t parse_seed_text(const std::string& text, const std::string& origin) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!text.empty() && text[0] == '-') throw std::invalid_argument("negative");
    v = std::stoull(text, &used, 10);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw ConfigError(origin + " must be a non-negative integer, got '" + text + "'");
  return v;
}

std::uint64_t resolve_seed(const std::optional<std::string>& flag) {
  if (flag) return parse_seed_text(*flag, "--seed");
  if (const char* env = std::getenv("WG_DEFAULT_SEED"); env && *env) return parse_seed_text(env, "WG_DEFAULT_SEED");
  return 0;
}

// ------------------------------------------------------------------- replay

int run_replay(const std::string& manifest_path, const std::string& out_path, std::ostream& out,
               std::ostream& err) {
  json manifest;
  try {
    manifest = json::parse(read_text_file(manifest_path));
  } catch (const json::parse_error& e) {
    throw ParseError(manifest_path, 1, static_cast<long>(e.byte), std::string("invalid manifest: ") + e.what());
  }
  if (!manifest.contains("args") || !manifest["args"].is_array() || manifest["args"].empty())
    throw ParseError(manifest_path, 1, 1, "manifest has no \"args\" list");
  if (manifest.value("tool", "") != kToolName)
    throw ConfigError("manifest was not written by " + std::string(kToolName));
  if (manifest.value("version", "") != kToolVersion)
    err << "warning: manifest from version " << manifest.value("version", "?") << ", running " << kToolVersion
        << '\n';

  std::vector<Violation> stale;
  for (const auto& in : manifest.value("inputs", json::array())) {
    const std::string path = in.at("path").get<std::string>();
    std::string digest;
    try {
      digest = sha256_hex(read_text_file(path));
    } catch (const std::exception& e) {
      stale.push_back({std::nullopt, e.what()});
      continue;
    }
    if (digest != in.at("sha256").get<std::string>())
      stale.push_back({std::nullopt, path + " changed since the manifest was written (sha256 " + digest + ")"});
  }
  if (!stale.empty()) throw ValidationError(std::move(stale));

  std::vector<std::string> args = manifest["args"].get<std::vector<std::string>>();
  if (args.front() == "replay") throw ConfigError("a manifest cannot replay a replay");
  if (!out_path.empty()) args.insert(args.end(), {"--out", out_path});
  return run_cli(args, out, err);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wasserstein globalness of explanation sets", kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::optional<std::string> seed_flag;
  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed_flag, "master seed (default: WG_DEFAULT_SEED or 0)");
  };

  ScoreFlags score_flags;
  CLI::App* score = app.add_subcommand("score", "normalized globalness of explanation files (shared radius)");
  add_score_flags(score, score_flags);
  add_seed(score);

  ScoreFlags compare_flags;
  CLI::App* compare = app.add_subcommand("compare", "score files with one shared baseline and rank them");
  add_score_flags(compare, compare_flags);
  compare->add_option("--csv", compare_flags.csv, "also write the ranking table as CSV");
  add_seed(compare);

  AxiomOptions axiom_opts;
  std::string axioms_out, axioms_junit;
  CLI::App* axioms = app.add_subcommand("axioms", "run the P1-P6 property suite");
  add_seed(axioms);
  axioms->add_option("--measure", axiom_opts.measure, "measure under the P6 check: wg | entropy | kl | tv");
  axioms->add_option("--tol-invariance", axiom_opts.invariance_tolerance, "P6 relative drift allowed");
  axioms->add_option("--tol-sensitivity", axiom_opts.sensitivity_tolerance, "P6 relative change required");
  axioms->add_option("--tol-local", axiom_opts.local_tolerance, "P4 ceiling");
  axioms->add_option("--tol-global", axiom_opts.global_slack, "P5 allowance above 1");
  axioms->add_option("--convexity-sigmas", axiom_opts.convexity_sigmas, "P3 slack in standard errors");
  axioms->add_option("--out", axioms_out, "write the JSON result here instead of stdout");
  axioms->add_option("--junit", axioms_junit, "write a JUnit XML summary here");

  std::string study_name, study_dir = ".";
  CLI::App* study = app.add_subcommand("study", "run a study and write CSV, JSON and markdown");
  study->add_option("name", study_name, "figure2 | jagged | smoothing | convergence")->required();
  study->add_option("--out", study_dir, "output directory");
  add_seed(study);

  GenerateFlags gen;
  CLI::App* generate = app.add_subcommand("generate", "write synthetic data or explanation files");
  generate->add_option("what", gen.what, "jagged | mixture | baseline | explanations")->required();
  generate->add_option("--n", gen.n, "rows");
  generate->add_option("--scale", gen.scale, "label-flood radius of the Jagged Boundary task");
  generate->add_option("--space", gen.space, "baseline space");
  generate->add_option("--s", gen.s, "baseline dimension");
  generate->add_option("--radius", gen.radius, "ball radius of the attribution baseline");
  generate->add_option("--explainer", gen.explainer,
                       "saliency | input_x_gradient | integrated_gradients | smooth_saliency | constant_global | "
                       "ground_truth");
  generate->add_option("--as", gen.as, "attribution | ranking");
  generate->add_option("--sigma", gen.sigma, "smoothing noise");
  generate->add_option("--draws", gen.draws, "smoothing draws");
  generate->add_option("--steps", gen.steps, "integrated-gradient steps");
  generate->add_option("--epochs", gen.epochs, "training epochs");
  generate->add_option("--out", gen.out, "output path (default stdout)");
  generate->add_option("--manifest", gen.manifest, "also write the run manifest here");
  add_seed(generate);

  std::string replay_manifest, replay_out;
  CLI::App* replay = app.add_subcommand("replay", "rerun a command from its manifest");
  replay->add_option("manifest", replay_manifest, "manifest JSON")->required();
  replay->add_option("--out", replay_out, "write the report here instead of stdout");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*score) return run_scoring("score", score_flags, resolve_seed(seed_flag), out);
    if (*compare) return run_scoring("compare", compare_flags, resolve_seed(seed_flag), out);
    if (*axioms) {
      axiom_opts.seed = resolve_seed(seed_flag);
      const AxiomSuite suite = run_axiom_suite(axiom_opts);
      emit(to_json(suite), axioms_out, out);
      if (!axioms_junit.empty()) write_file_atomic(axioms_junit, to_junit_xml(suite));
      for (const auto& c : suite.checks)
        err << (c.passed ? "PASS " : "FAIL ") << c.name << ' ' << c.title << ": " << c.detail << '\n';
      return suite.passes ? kExitOk : kExitChecksFailed;
    }
    if (*study) {
      const auto& names = study_names();
      if (std::find(names.begin(), names.end(), study_name) == names.end()) {
        err << "error: unknown study '" << study_name << "' (expected figure2, jagged, smoothing or convergence)\n";
        return kExitUsage;
      }
      const StudyArtifacts a = run_study(study_name, resolve_seed(seed_flag));
      const std::filesystem::path dir(study_dir);
      write_file_atomic((dir / (a.name + ".csv")).string(), a.csv);
      write_file_atomic((dir / (a.name + ".json")).string(), a.json);
      write_file_atomic((dir / (a.name + ".md")).string(), a.summary_markdown);
      out << a.summary_markdown;
      return kExitOk;
    }
    if (*generate) return run_generate(gen, resolve_seed(seed_flag), out);
    if (*replay) return run_replay(replay_manifest, replay_out, out, err);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "validation failed:\n" << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace wg
