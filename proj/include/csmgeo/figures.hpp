#pragma once
// Figure datasets: for a named example face, integrate the asymptotic
// selection flow and the geodesic from a grid of starting machines into a
// baked-in goal machine, and evaluate the path-divergence excess of each
// trajectory. Names: "fig2" (one-state, three symbols), "fig4:<code>"
// (two-state binary faces, 4-digit transition code), "fig5" (the three-state
// Nemo face).

#include <string>
#include <vector>

#include "csmgeo/dynamics.hpp"
#include "csmgeo/evolution.hpp"
#include "csmgeo/geodesic.hpp"

namespace csmgeo {

struct FigureOptions {
  int grid = 3;  // grid x grid cells (triangular domains keep the admissible subset)
  int N = 2;
  double beta = 0.0;  // <= 0 selects alpha(N)^2, which makes trajectories unit speed
  uint64_t seed = kDefaultSeed;  // recorded in the manifest; datasets are deterministic
};

struct FigureCell {
  int id = 0;
  std::vector<double> start;  // ambient edge coordinates
  std::vector<double> goal;   // per-cell goal (differs across components on fig4:2221)
  bool flow_ok = false;       // flow reached the goal's rest set
  bool geodesic_ok = false;
  bool lyapunov_decreasing = false;  // h(goal || q(t)) non-increasing along the flow
  double curve_energy = 0.0;  // half squared g-length: constant-speed [0, 1] convention
  double geodesic_energy = 0.0;
  double excess = 0.0;  // curve energy - geodesic energy, defined when geodesic_ok
  FlowCurve flow;
  GeodesicResult geodesic;
  std::string note;
};

struct FigureBundle {
  std::string name;
  DfaType dfa;
  int display_x_edge = 0;  // which ambient coordinates the plots project to
  int display_y_edge = 1;
  std::vector<FigureCell> cells;
  int n_flow_ok = 0, n_geodesic_ok = 0;
};

// The baked-in example faces.
DfaType one_state_dfa(int n_symbols);
DfaType two_state_dfa(const std::string& code);  // 4 digits over {1,2}, e.g. "2121"
DfaType nemo_dfa();

FigureBundle make_figure(const std::string& name, const FigureOptions& opts = {});

// Write trajectories.csv, geodesics.csv, excess.csv and matching SVGs.
void write_figure_bundle(const FigureBundle& b, const std::string& dir);

}  // namespace csmgeo
