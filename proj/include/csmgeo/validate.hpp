#pragma once
// Validation suites shared by the CLI and the acceptance tests. Each suite
// runs a self-contained scenario with pinned tolerances, returns per-check
// results plus CSV table rows, and passes iff every check passes.

#include <cstdint>
#include <string>
#include <vector>

#include "csmgeo/ensemble.hpp"
#include "csmgeo/evolution.hpp"

namespace csmgeo {

struct ValidateCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool less_is_pass = true;  // pass iff value <= threshold (else value >= threshold)
  bool pass = false;
  std::string detail;
};

struct ValidateReport {
  std::string suite;
  std::vector<ValidateCheck> checks;
  std::vector<std::string> table_header;         // one CSV table per suite
  std::vector<std::vector<std::string>> table;
  bool pass = false;

  void finish();  // fold per-check passes into the suite verdict
};

// Jet agreement between the relative entropy rate and its quadratic model:
// log-log slope of |h(q + t v || q) - t^2/2 g(v,v)| against t must sit in
// [2.8, 3.2] for every sampled (q, v) pair on the machine's face.
ValidateReport validate_geometry(const Machine& m, int n_pairs, uint64_t seed);

struct LdpScenario {
  Machine q;       // sampling machine
  Machine target;  // the tracked realization is the nearest to this
  std::vector<long> Ls{50, 100, 200};
  double rel_tol = 0.05;  // at the largest L
};
LdpScenario default_ldp_scenario();
ValidateReport validate_ldp(const LdpScenario& sc);

struct CltScenario {
  Machine q;
  long L = 10000;
  long L_coarse = 1000;  // covariance error must shrink from here to L
  long n_samples = 100000;
  uint64_t seed = kDefaultSeed;
  double cov_tol = 0.05;
};
CltScenario default_clt_scenario();
ValidateReport validate_clt(const CltScenario& sc);

struct TrajectoryScenario {
  Machine start;
  Machine goal;
  int N = 2;
  long L = 10000;
  long L_coarse = 1000;  // sup-deviation must shrink from here to L
  int mc_runs = 10000;
  int generations = 60;  // at the fine L; coarse run covers the same time span
  uint64_t seed = kDefaultSeed;
};
TrajectoryScenario default_trajectory_scenario();
// Monte Carlo expectation trajectory against the straight unit-speed segment
// toward the goal (the discrete iterates of the asymptotic selection field,
// which lie on that segment); deviations measured in 3 pooled standard errors.
ValidateReport validate_trajectory(const TrajectoryScenario& sc);

void write_report_csv(const ValidateReport& rep, const std::string& path);
std::string report_text(const ValidateReport& rep);  // human-readable summary

}  // namespace csmgeo
