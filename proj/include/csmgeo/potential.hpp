#pragma once
// Fitness potentials: scalar functions of machines with gradient covectors.
// Shipped potentials carry analytic gradients; arbitrary callables get a
// finite-difference gradient in the face chart. Construction-time check:
// directional derivatives must match finite differences.

#include <functional>
#include <string>

#include "csmgeo/geometry.hpp"
#include "csmgeo/rng.hpp"

namespace csmgeo {

struct FitnessPotential {
  std::string name;
  std::function<double(const Machine&)> value;      // may return -infinity off-support
  std::function<Covector(const Machine&)> gradient; // interior machines only
};

// Phi(q) = -h(goal || q): maximal (zero) exactly at the goal machine.
// Extends continuously to -infinity where q loses an edge the goal uses.
FitnessPotential relent_goal_potential(const Machine& goal);

// Phi(q) = sum_e r_e q^e (for one-state machines: a linear game payoff).
FitnessPotential linear_payoff_potential(const DfaType& dfa, std::vector<double> r);

// Phi(q) = 1/2 sum_{e,f} q^e R_{ef} q^f with symmetric R (quadratic payoff).
FitnessPotential quadratic_payoff_potential(const DfaType& dfa,
                                            std::vector<std::vector<double>> R);

// Wrap a black-box value function; gradient by central differences (step
// 1e-6) in the chart, returned with eliminated components set to zero.
FitnessPotential fd_potential(const DfaType& dfa, std::string name,
                              std::function<double(const Machine&)> value);

// Verify gradient/value consistency at m: relative error of directional
// derivatives against central differences below rel_tol on random directions.
void check_potential_gradient(const FitnessPotential& pot, const Machine& m, RngStream& rng,
                              int n_directions = 10, double rel_tol = 1e-4);

}  // namespace csmgeo
