#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wg/spaces.hpp"

namespace wg {

struct AxiomOptions {
  std::uint64_t seed = 0;
  // P6: the measure under test. "wg" runs the planar isometry check and the
  // 1-D transformation study; "entropy", "kl" and "tv" run the study only.
  std::string measure = "wg";
  double invariance_tolerance = 0.02;   // relative drift allowed under isometries
  double sensitivity_tolerance = 0.10;  // relative change required under 0.5 scaling
  double local_tolerance = 0.05;        // P4 ceiling on normalized WG
  double global_slack = 0.03;           // P5 allowance above 1
  double convexity_sigmas = 3.0;        // P3 slack in Monte Carlo standard errors

  int fuzz_cases = 100;
  Index local_samples = 2000;
  Index isometry_samples = 4000;
  int isometry_projections = 2000;
  Index convexity_samples = 400;
  int convexity_pairs = 4;
  int convexity_repeats = 8;
};

struct AxiomCheck {
  std::string name;    // P1 ... P6
  std::string title;
  bool passed = false;
  double measured = 0.0;   // the statistic compared against `threshold`
  double threshold = 0.0;
  std::string detail;
};

struct AxiomSuite {
  std::vector<AxiomCheck> checks;
  AxiomOptions options;
  bool passes = false;
  const AxiomCheck& check(const std::string& name) const;
};

AxiomCheck check_non_negativity(const AxiomOptions& options);
AxiomCheck check_continuity(const AxiomOptions& options);
AxiomCheck check_convexity(const AxiomOptions& options);
AxiomCheck check_fully_local(const AxiomOptions& options);
AxiomCheck check_fully_global(const AxiomOptions& options);
AxiomCheck check_selective_invariance(const AxiomOptions& options);

// Runs P1 through P6 in order; throws ConfigError for an unknown measure.
AxiomSuite run_axiom_suite(const AxiomOptions& options);

std::string to_junit_xml(const AxiomSuite& suite);
std::string to_json(const AxiomSuite& suite);

}  // namespace wg
