#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wg/random.hpp"
#include "wg/synth.hpp"

namespace wg {

// An analytic density on the real line with an explicit support interval
// (the density is zero outside [lo, hi]) and a seeded sampler.
struct Density1D {
  std::function<double(double)> pdf;
  double lo = 0.0;
  double hi = 0.0;
  std::function<double(Rng&)> sample;
};

Density1D uniform_density(double lo, double hi);
// Gaussian mixture truncated to the hull of mean +/- 8 sd of its components;
// the discarded mass is below 1e-14.
Density1D mixture_density(const std::vector<MixtureComponent>& components);
Density1D normal_density(double mean, double sd);

// Composite Simpson rule over the support.
double integrate_density(const Density1D& d, int panels = 200000);

// Invertible map of the line with constant |Jacobian|.
struct Map1D {
  std::string name;
  std::function<double(double)> forward;
  std::function<double(double)> inverse;
  double abs_jacobian = 1.0;
  std::function<std::pair<double, double>(double, double)> image_of_interval;
};

Map1D identity_map();
Map1D reflect_map();
Map1D translate_map(double offset);
Map1D scale_map(double factor);
/// Swaps the pieces [lo, cut) and [cut, hi) of an interval, leaving points
/// outside it fixed. Measure preserving, not an isometry.
Map1D interval_swap_map(double lo, double hi, double cut);

// Density of the push-forward of `d` through `map`.
Density1D pushforward(const Density1D& d, const Map1D& map);

struct MCEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  bool defined = true;
  long excluded = 0;  // samples dropped for zero density
};

/// Differential entropy E[-log nu(X)], X ~ nu.
MCEstimate entropy_mc(const Density1D& d, long num_samples, std::uint64_t seed);

/// KL divergence as the f-divergence E_{X~u}[f(nu(X)/u(X))], f(t) = t log t.
/// Undefined when nu has support outside u's.
MCEstimate kl_mc(const Density1D& nu, const Density1D& u, long num_samples, std::uint64_t seed);

/// Total variation 1/2 int |nu - u|, in [0, 1].
MCEstimate tv_mc(const Density1D& nu, const Density1D& u, long num_samples, std::uint64_t seed);

struct StudyCell {
  std::string metric;
  std::string transform;
  double value = 0.0;
  double standard_error = 0.0;
  bool defined = true;
};

struct P6Verdict {
  std::string metric;
  bool invariant_reflect = false;
  bool invariant_translate = false;
  bool sensitive_scale = false;    // to the 0.5 homothety
  bool sensitive_relabel = false;  // to the measure-preserving interval swap
  bool passes = false;
};

struct P6StudyOptions {
  Index wg_samples = 20000;
  int wg_repeats = 5;
  long mc_samples = 1000000;
  double baseline_half_width = 30.0;
  double translate_by = 10.0;
  double scale_factor = 0.5;
  double support_breaking_scale = 2.0;
  // Relabeling swaps [relabel_lo, relabel_cut) with [relabel_cut, relabel_hi];
  // it moves the narrow mode only.
  double relabel_lo = 0.0;
  double relabel_cut = 10.0;
  double relabel_hi = 20.0;
  double invariance_tol = 0.02;
  double sensitivity_tol = 0.10;
};

struct P6Study {
  std::vector<StudyCell> cells;
  std::vector<P6Verdict> verdicts;

  const StudyCell& cell(const std::string& metric, const std::string& transform) const;
  const P6Verdict& verdict(const std::string& metric) const;
};

// Transform labels used in the study table, in column order.
inline const std::vector<std::string> kStudyTransforms = {
    "A_original", "B_reflect", "C_translate", "D_scale", "D_support_break", "E_relabel"};
inline const std::vector<std::string> kStudyMetrics = {"wg", "entropy", "kl", "tv"};

/// Evaluates WG (normalized, exact 1-D solver, baseline U[-30, 30]), entropy,
/// KL and TV on the study mixture under each transform, and scores each
/// metric against selective invariance: invariant to reflection and
/// translation, sensitive to scaling and to the relabeling.
P6Study p6_violation_study(std::uint64_t seed, const P6StudyOptions& options = {});

// Long-format CSV: metric,transform,value,stderr,defined
std::string to_csv(const P6Study& study);

}  // namespace wg
