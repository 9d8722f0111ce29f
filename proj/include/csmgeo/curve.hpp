#pragma once
// Sampled curves of interior machines on one face, their kinetic energy
// E(c) = 1/2 int g(c)(c', c') dt, and the CSV exchange format
// (header "t,q_<state>_<symbol>,...", 17 significant digits).

#include <string>
#include <vector>

#include "csmgeo/geometry.hpp"

namespace csmgeo {

struct Curve {
  DfaType dfa;
  std::vector<double> t;                    // strictly increasing
  std::vector<std::vector<double>> points;  // ambient edge coordinates

  static Curve make(DfaType dfa, std::vector<double> t,
                    std::vector<std::vector<double>> points);
  int size() const { return static_cast<int>(t.size()); }
  Machine machine_at(int i) const { return Machine::make(dfa, points[i]); }
};

struct EnergyEstimate {
  double value = 0.0;            // midpoint-rule quadrature on the samples
  double refined_error = 0.0;    // Richardson estimate from half resolution
};

// Quadrature with chord velocities and the metric at segment midpoints.
EnergyEstimate curve_energy(const Curve& c);
// g-arclength on the same quadrature; invariant under reparameterization.
EnergyEstimate curve_length(const Curve& c);

void write_curve_csv(const Curve& c, const std::string& path);
Curve read_curve_csv(const std::string& path, const DfaType& dfa);

}  // namespace csmgeo
