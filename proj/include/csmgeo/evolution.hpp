#pragma once
// Finite-population evolution: a resample-select (generalized Wright-Fisher)
// step draws N offspring edge-strings of length L from the current machine,
// forms their empirical machines, and promotes the fittest (ties uniform).
// Chains, Monte Carlo expectation trajectories, and their CSV formats.

#include <cstdint>
#include <string>
#include <vector>

#include "csmgeo/machine.hpp"
#include "csmgeo/potential.hpp"
#include "csmgeo/rng.hpp"

namespace csmgeo {

inline constexpr uint64_t kDefaultSeed = 987654321;

enum class DegeneratePolicy {
  inherit_parent_row,  // unvisited states copy the parent's row (default)
  reject_resample      // redraw degenerate offspring, up to the retry budget
};

struct GwfConfig {
  long L = 1000;           // resampled string length
  int N = 2;               // offspring per generation (>= 2)
  int generations = 100;
  double tau = 0.0;        // step duration; 0 means sqrt(beta/L)
  double beta = 1.0;
  uint64_t seed = kDefaultSeed;
  int mc_runs = 1000;      // independent draws per expectation-trajectory step
  DegeneratePolicy policy = DegeneratePolicy::inherit_parent_row;
  int max_retries = 100;   // per-offspring budget under reject_resample

  double step_tau() const;
};

struct EmpiricalMachine {
  DfaType dfa;
  long L = 0;
  std::vector<long> counts;        // per edge
  std::vector<long> state_counts;  // per state
  bool degenerate = false;         // some state unvisited or edge count zero

  static EmpiricalMachine from_counts(DfaType dfa, std::vector<long> counts);

  // Realize probabilities counts/state_counts as exact rationals; unvisited
  // states follow the policy (inherit the parent row, or refuse).
  Machine realize(const Machine& parent, DegeneratePolicy policy) const;
};

struct GwfStepResult {
  Machine selected;
  double fitness = 0.0;
  std::vector<double> offspring_fitness;  // all N values, selection order
  int retries = 0;                        // resamples spent (reject policy)
};

GwfStepResult gwf_step(const Machine& parent, const FitnessPotential& pot,
                       const GwfConfig& cfg, RngStream& rng);

struct ChainRecord {
  DfaType dfa;
  GwfConfig cfg;
  std::vector<double> fitness;                  // per generation
  std::vector<std::vector<double>> coords;      // selected machine per generation
  std::vector<double> fitness_min, fitness_max; // offspring spread per generation
};

// Bitwise reproducible for fixed (start, cfg): generation g uses the derived
// stream (seed, g).
ChainRecord run_gwf_chain(const Machine& start, const FitnessPotential& pot,
                          const GwfConfig& cfg);

void write_chain_csv(const ChainRecord& rec, const std::string& path);

struct ExpectationTrajectory {
  DfaType dfa;
  std::vector<double> t;                    // 0, tau, 2 tau, ...
  std::vector<std::vector<double>> mean;    // mean selected machine per step
  std::vector<std::vector<double>> se;      // per-coordinate standard errors
};

// Iterated conditional expectation: each step averages mc_runs independent
// gwf_step draws from the current mean machine. Step n run r uses the derived
// stream (seed, n, r), so results do not depend on evaluation order.
ExpectationTrajectory expectation_trajectory(const Machine& start, const FitnessPotential& pot,
                                             const GwfConfig& cfg);

void write_expectation_csv(const ExpectationTrajectory& tr, const std::string& path);

}  // namespace csmgeo
