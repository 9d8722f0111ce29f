#pragma once
// Geodesics of the entropy-rate metric: Christoffel symbols from central
// finite differences of the chart metric, the exponential map by fixed-step
// RK4, and a two-point boundary solver by damped-Newton shooting seeded from
// the ambient chord and the square-root-coordinate chord.

#include <string>

#include "csmgeo/curve.hpp"
#include "csmgeo/geometry.hpp"

namespace csmgeo {

struct ChristoffelOptions {
  double fd_step = 1e-5;         // central difference step in the chart
  double boundary_margin = 2e-5; // reject points whose edge coords come closer
};

struct Christoffel {
  Chart chart;
  std::vector<double> gamma;  // [k*dim*dim + i*dim + j], symmetric in (i, j)
  double at(int k, int i, int j) const;
};

Christoffel christoffel(const Machine& m, const ChristoffelOptions& opts = {});

struct ExpMapOptions {
  int steps = 512;
  double fd_step = 1e-5;
  double boundary_margin = 1e-6;  // stop when an edge coordinate falls below
  double speed_drift_tol = 5e-3;  // flag non-constant speed above this
};

struct ExpMapResult {
  Curve curve;           // samples over t in [0, 1] (truncated when exiting)
  bool exited = false;   // left the face before t = 1
  double speed_drift = 0.0;  // max relative drift of the g-speed
  bool constant_speed = true;
};

// Geodesic with initial point m and initial velocity v, integrated to t = 1.
ExpMapResult exp_map(const Machine& m, const TangentVector& v,
                     const ExpMapOptions& opts = {});

struct GeodesicOptions {
  double residual_tol = 1e-8;  // ambient endpoint residual (max norm)
  int max_newton_iters = 60;
  ExpMapOptions exp_opts;
};

struct GeodesicResult {
  bool converged = false;
  Curve curve;
  TangentVector v0;      // initial velocity of the best solution
  double energy = 0.0;   // 1/2 g(v0, v0)
  double residual = 0.0; // ambient endpoint mismatch of the best attempt
  int starts_tried = 0;
  std::string message;
};

// Minimal-energy connecting geodesic found by multi-start shooting. Never
// falls back silently: converged == false means no start met the tolerance.
GeodesicResult geodesic_bvp(const Machine& from, const Machine& to,
                            const GeodesicOptions& opts = {});

struct PathDivergenceExcess {
  double excess = 0.0;          // curve energy minus geodesic energy
  double curve_energy = 0.0;
  double geodesic_energy = 0.0;
  bool geodesic_converged = false;
};

// How much more energy a curve spends than the connecting geodesic between
// its endpoints; non-negative up to quadrature error for any curve.
PathDivergenceExcess path_divergence_excess(const Curve& c,
                                            const GeodesicOptions& opts = {});

}  // namespace csmgeo
