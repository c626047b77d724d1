#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wg/candidates.hpp"
#include "wg/mlp.hpp"
#include "wg/spaces.hpp"
#include "wg/synth.hpp"

namespace wg {

// Rendered output of one study: long-format CSV, a JSON document and a
// markdown pass/fail summary.
struct StudyArtifacts {
  std::string name;
  std::string csv;
  std::string json;
  std::string summary_markdown;
  bool passes = false;
};

const std::vector<std::string>& study_names();

// Dispatches by name; throws ConfigError for an unknown study.
StudyArtifacts run_study(const std::string& name, std::uint64_t seed);

// ---------------------------------------------------------------- figure2

StudyArtifacts render_figure2(const P6Study& study);

// ------------------------------------------------------------------ jagged

struct JaggedStudyOptions {
  Index n = 1000;
  double epsilon = 0.25;
  int seeds = 10;
  int ig_steps = 64;
  MlpTrainingConfig training;  // seed field is overwritten per run
};

struct JaggedRun {
  double scale = 0.0;
  int replicate = 0;
  double train_accuracy = 0.0;
  double accuracy_ig = 0.0;
  double accuracy_constant = 0.0;
  double wg_ig = 0.0;
  double wg_constant = 0.0;
  double wg_ground_truth = 0.0;
};

struct JaggedScaleSummary {
  double scale = 0.0;
  double accuracy_ig = 0.0;
  double accuracy_constant = 0.0;
  double wg_ig = 0.0;
  double wg_constant = 0.0;
  double wg_ground_truth = 0.0;
  bool ig_more_accurate = false;
  bool ig_closer_to_ground_truth = false;
};

struct JaggedStudy {
  std::vector<JaggedRun> runs;
  std::vector<JaggedScaleSummary> scales;
  bool passes = false;
};

/// Explainer accuracy and ranking-space globalness (|attribution| argsort,
/// Kendall tau, uniform permutations) of Integrated Gradients, the constant
/// global explainer and the ground truth, per perturbation scale
/// {0, eps, 2 eps, 4 eps}, averaged over independent datasets and models.
JaggedStudy jagged_study(std::uint64_t seed, const JaggedStudyOptions& options = {});
StudyArtifacts render_jagged(const JaggedStudy& study);

// --------------------------------------------------------------- smoothing

struct SmoothingStudyOptions {
  Index n = 300;
  std::vector<double> sigmas = {0.0, 0.1, 1.0, 10.0};
  int seeds = 5;
  int num_draws = 500;
  int projections = 500;
  double constant_tolerance = 0.03;
  MlpTrainingConfig training;
};

struct SmoothingStudy {
  std::vector<double> sigmas;
  std::vector<std::vector<double>> wg;  // [sigma][replicate]
  std::vector<double> wg_constant;      // [replicate]
  std::vector<double> mean;
  std::vector<double> standard_error;
  // Mean and standard error over replicates of wg[i+1] - wg[i].
  std::vector<double> step_mean;
  std::vector<double> step_standard_error;
  double constant_mean = 0.0;
  bool monotone = false;
  bool constant_pinned = false;
  bool passes = false;
};

/// Normalized attribution-space globalness of Smooth(Saliency, sigma) on a
/// trained Jagged Boundary model. Per replicate the radius k is shared by all
/// sigmas and the constant explainer. Monotone means every step's mean
/// change is at least minus one standard error.
SmoothingStudy smoothing_study(std::uint64_t seed, const SmoothingStudyOptions& options = {});
StudyArtifacts render_smoothing(const SmoothingStudy& study);

// ------------------------------------------------------------- convergence

// Quantile function of a Gaussian mixture, by bisection on its CDF.
double mixture_quantile(const std::vector<MixtureComponent>& components, double u);
double mixture_mean(const std::vector<MixtureComponent>& components);

/// Population p-Wasserstein distance between the centered mixture and
/// U[-half_width, half_width], by quantile coupling and midpoint quadrature.
double mixture_vs_uniform_wasserstein(const std::vector<MixtureComponent>& components,
                                      double half_width, double p, int nodes = 200000);

struct ConvergenceCurve {
  std::string name;
  std::vector<Index> n;
  std::vector<double> deviation;
  std::vector<double> standard_error;
  double reference = 0.0;
  double slope = 0.0;
};

struct ConvergenceStudyOptions {
  std::vector<Index> n_list = {50, 100, 200, 400, 800, 1600, 3200};
  int repeats = 20;
  int projections = 500;
};

struct ConvergenceStudy {
  std::vector<ConvergenceCurve> curves;
  bool passes = false;
};

/// Deviation of the empirical estimate from its population value against N:
/// the 1-D study mixture (exact solver, quadrature reference) and draws from
/// the s = 2 ball baseline itself (sliced solver, reference 0).
ConvergenceStudy convergence_study(std::uint64_t seed, const ConvergenceStudyOptions& options = {});
ConvergenceCurve mixture_convergence_curve(std::uint64_t seed, const std::vector<Index>& n_list, int repeats);
StudyArtifacts render_convergence(const ConvergenceStudy& study);

// Writes `contents` to `path` through a sibling temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace wg
