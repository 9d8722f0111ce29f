#include "csmgeo/figures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "csmgeo/svg.hpp"
#include "csmgeo/util.hpp"

namespace csmgeo {

DfaType one_state_dfa(int n_symbols) {
  if (n_symbols < 1) throw std::invalid_argument("one_state_dfa: need >= 1 symbols");
  std::vector<std::vector<int>> next(1, std::vector<int>(n_symbols, 0));
  return DfaType::make(1, Alphabet::of_size(n_symbols), std::move(next));
}

DfaType two_state_dfa(const std::string& code) {
  if (code.size() != 4 || code.find_first_not_of("12") != std::string::npos)
    throw std::invalid_argument("two_state_dfa: code must be 4 digits over {1,2}, got '" +
                                code + "'");
  return DfaType::from_code(code, Alphabet::of_size(2));
}

DfaType nemo_dfa() {
  // Symbol 0 cycles 0 -> 1 -> 2 -> 0; state 0 also loops on symbol 1 and
  // state 2 can return on symbol 1 as well. State 1 emits only symbol 0.
  return DfaType::make(3, Alphabet::of_size(2), {{1, 0}, {2, -1}, {0, 0}});
}

namespace {

std::vector<double> grid_values(int n, double lo, double hi) {
  if (n < 1) throw std::invalid_argument("figure grid must be >= 1");
  std::vector<double> v;
  if (n == 1) {
    v.push_back(0.5 * (lo + hi));
    return v;
  }
  for (int i = 0; i < n; i++) v.push_back(lo + i * (hi - lo) / (n - 1));
  return v;
}

// Rest detection for the normalized selection field: below this gradient norm
// the trajectory is considered to have reached the goal. The norm equals the
// g-distance to the goal to first order, and the field direction flips across
// it, so a much smaller ball only makes the integrator grind near the rest
// point without adding accuracy.
constexpr double kFigureRestThreshold = 1e-4;

FigureCell run_cell(const DfaType& dfa, int id, std::vector<double> start_q,
                    std::vector<double> goal_q, const FigureOptions& opts) {
  FigureCell cell;
  cell.id = id;
  cell.start = start_q;
  cell.goal = goal_q;

  Machine start = Machine::make(dfa, std::move(start_q));
  Machine goal = Machine::make(dfa, cell.goal);
  FitnessPotential pot = relent_goal_potential(goal);
  double beta = opts.beta > 0 ? opts.beta : alpha_max_gauss(opts.N) * alpha_max_gauss(opts.N);
  VectorField field = [&pot, &opts, beta](const Machine& m) {
    return asymptotic_gwf_field(m, pot, opts.N, beta, kFigureRestThreshold);
  };

  FlowOptions fopts;
  fopts.t_max = 40.0;
  fopts.local_tol = 1e-10;
  fopts.dt_max = 0.005;  // keeps samples dense enough for the energy quadrature
  fopts.max_steps = 400000;
  cell.flow = integrate_flow(start, field, "asymptotic_gwf[" + pot.name + "]", fopts);
  Curve& fc = cell.flow.curve;

  double end_dev = 0.0;
  for (int e = 0; e < dfa.n_edges(); e++)
    end_dev = std::max(end_dev, std::abs(fc.points.back()[e] - cell.goal[e]));
  cell.flow_ok = cell.flow.termination == FlowTermination::rest && end_dev < 1e-3;
  if (!cell.flow_ok)
    cell.note += "flow " + to_string(cell.flow.termination) + " end_dev " + fmt17(end_dev) + "; ";

  if (cell.flow_ok && end_dev > 0.0) {
    // Close the trajectory to its limit: rest stopped it just inside the
    // threshold ball, and the goal is the potential's unique interior minimum.
    std::vector<double> mid(fc.points.back());
    std::vector<double> chord(cell.goal);
    for (int e = 0; e < dfa.n_edges(); e++) {
      mid[e] = 0.5 * (mid[e] + cell.goal[e]);
      chord[e] -= fc.points.back()[e];
    }
    TangentVector cv = TangentVector::make(dfa, std::move(chord));
    double len = std::sqrt(metric_apply(Machine::make(dfa, mid), cv, cv));
    if (len > 1e-15) {
      fc.t.push_back(fc.t.back() + len);  // unit-speed time for the closing chord
      fc.points.push_back(cell.goal);
    }
  }

  cell.lyapunov_decreasing = true;
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i < fc.size(); i++) {
    double h = relative_entropy_rate(goal, fc.machine_at(i));
    if (h > prev + 1e-8) {
      cell.lyapunov_decreasing = false;
      cell.note += "lyapunov up at t " + fmt17(fc.t[i]) + "; ";
      break;
    }
    prev = h;
  }

  cell.geodesic = geodesic_bvp(start, goal);
  cell.geodesic_ok = cell.geodesic.converged;
  cell.geodesic_energy = cell.geodesic.energy;
  if (!cell.geodesic_ok) cell.note += "geodesic: " + cell.geodesic.message + "; ";

  // Energies are compared over a common unit parameter interval: for the
  // constant-speed reparameterization over [0, 1] the energy is half the
  // squared g-length, which no longer depends on how the flow was timed.
  // The geodesic energy already follows that convention.
  double len = curve_length(fc).value;
  cell.curve_energy = 0.5 * len * len;
  if (cell.geodesic_ok) cell.excess = cell.curve_energy - cell.geodesic_energy;
  return cell;
}

void append_cells_fig2(FigureBundle& b, const FigureOptions& opts) {
  b.dfa = one_state_dfa(3);
  b.display_x_edge = 0;
  b.display_y_edge = 1;
  std::vector<double> xs = grid_values(opts.grid, 0.1, 0.8);
  std::vector<double> ys = grid_values(opts.grid, 0.1, 0.8);
  int id = 0;
  for (double y : ys)
    for (double x : xs) {
      if (x + y > 0.9) continue;  // keep the third coordinate at least 0.1
      b.cells.push_back(run_cell(b.dfa, id++, {x, y, 1.0 - x - y}, {0.2, 0.6, 0.2}, opts));
    }
}

void append_cells_fig4(FigureBundle& b, const std::string& code, const FigureOptions& opts) {
  b.dfa = two_state_dfa(code);
  b.display_x_edge = 0;  // q_0_0 against q_1_0: the two free row parameters
  b.display_y_edge = 2;
  std::vector<double> xs = grid_values(opts.grid, 0.15, 0.75);
  std::vector<double> ys = grid_values(opts.grid, 0.25, 0.85);
  bool both_sides = code == "2221";  // this face is plotted across the diagonal
  int id = 0;
  for (double y : ys)
    for (double x : xs) {
      if (std::abs(x - y) < 0.02) continue;  // stay clear of the degenerate diagonal
      if (!both_sides && x > y) continue;
      std::vector<double> goal =
          (!both_sides || y > x) ? std::vector<double>{0.2, 0.8, 0.6, 0.4}
                                 : std::vector<double>{0.6, 0.4, 0.2, 0.8};
      b.cells.push_back(run_cell(b.dfa, id++, {x, 1.0 - x, y, 1.0 - y}, goal, opts));
    }
}

void append_cells_fig5(FigureBundle& b, const FigureOptions& opts) {
  b.dfa = nemo_dfa();
  b.display_x_edge = 0;  // q_0_0 against q_2_0: the two free row parameters
  b.display_y_edge = 3;
  std::vector<double> xs = grid_values(opts.grid, 0.2, 0.8);
  std::vector<double> ys = grid_values(opts.grid, 0.2, 0.8);
  int id = 0;
  for (double y : ys)
    for (double x : xs)
      b.cells.push_back(
          run_cell(b.dfa, id++, {x, 1.0 - x, 1.0, y, 1.0 - y}, {0.2, 0.8, 1.0, 0.6, 0.4}, opts));
}

}  // namespace

FigureBundle make_figure(const std::string& name, const FigureOptions& opts) {
  FigureBundle b;
  b.name = name;
  if (name == "fig2") {
    append_cells_fig2(b, opts);
  } else if (name.rfind("fig4:", 0) == 0) {
    append_cells_fig4(b, name.substr(5), opts);
  } else if (name == "fig5") {
    append_cells_fig5(b, opts);
  } else {
    throw std::invalid_argument("unknown figure '" + name +
                                "' (expected fig2, fig4:<code>, or fig5)");
  }
  for (const FigureCell& c : b.cells) {
    if (c.flow_ok) b.n_flow_ok++;
    if (c.geodesic_ok) b.n_geodesic_ok++;
  }
  return b;
}

namespace {

void write_curve_rows(std::ofstream& f, int cell_id, const Curve& c) {
  for (int i = 0; i < c.size(); i++) {
    f << cell_id << "," << fmt17(c.t[i]);
    for (double x : c.points[i]) f << "," << fmt17(x);
    f << "\n";
  }
}

std::string coord_header(const DfaType& dfa) {
  std::string h;
  for (const auto& [j, a] : dfa.edge_list)
    h += ",q_" + std::to_string(j) + "_" + dfa.alphabet.symbols[a];
  return h;
}

void render_curves_svg(const FigureBundle& b, bool geodesics, const std::string& path) {
  SvgPlot plot(0.0, 1.0, 0.0, 1.0);
  int xe = b.display_x_edge, ye = b.display_y_edge;
  for (const FigureCell& c : b.cells) {
    const Curve* curve = geodesics ? &c.geodesic.curve : &c.flow.curve;
    if (geodesics && !c.geodesic_ok) continue;
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < curve->size(); i++)
      pts.emplace_back(curve->points[i][xe], curve->points[i][ye]);
    plot.polyline(pts, geodesics ? "#7a1fa2" : "#1f77b4", 1.2);
    plot.circle(c.start[xe], c.start[ye], 3.0, "#222222");
    plot.circle(c.goal[xe], c.goal[ye], 4.0, "#d62728");
  }
  plot.axes(b.dfa.edge_name(xe), b.dfa.edge_name(ye));
  plot.save(path);
}

void render_excess_svg(const FigureBundle& b, const std::string& path) {
  SvgPlot plot(0.0, 1.0, 0.0, 1.0);
  int xe = b.display_x_edge, ye = b.display_y_edge;
  double scale = 0.0;
  for (const FigureCell& c : b.cells)
    if (c.geodesic_ok) scale = std::max(scale, std::abs(c.excess));
  if (scale <= 0.0) scale = 1.0;
  for (const FigureCell& c : b.cells) {
    std::string fill = c.geodesic_ok ? diverging_color(c.excess / scale) : "#bbbbbb";
    plot.square(c.start[xe], c.start[ye], 9.0, fill);
    plot.circle(c.goal[xe], c.goal[ye], 4.0, "#d62728");
  }
  plot.axes(b.dfa.edge_name(xe), b.dfa.edge_name(ye));
  plot.text(70.0, 30.0, "path-divergence excess, red scale " + fmt17(scale));
  plot.save(path);
}

}  // namespace

void write_figure_bundle(const FigureBundle& b, const std::string& dir) {
  std::string coords = coord_header(b.dfa);

  std::ofstream traj(dir + "/trajectories.csv");
  if (!traj) throw std::runtime_error("cannot write " + dir + "/trajectories.csv");
  traj << "cell,t" << coords << "\n";
  for (const FigureCell& c : b.cells) write_curve_rows(traj, c.id, c.flow.curve);

  std::ofstream geo(dir + "/geodesics.csv");
  geo << "cell,t" << coords << "\n";
  for (const FigureCell& c : b.cells)
    if (c.geodesic_ok) write_curve_rows(geo, c.id, c.geodesic.curve);

  std::ofstream ex(dir + "/excess.csv");
  ex << "cell,start_x,start_y,goal_x,goal_y,flow_ok,geodesic_ok,lyapunov_decreasing,"
        "flow_duration,curve_energy,geodesic_energy,excess,note\n";
  for (const FigureCell& c : b.cells) {
    ex << c.id << "," << fmt17(c.start[b.display_x_edge]) << ","
       << fmt17(c.start[b.display_y_edge]) << "," << fmt17(c.goal[b.display_x_edge]) << ","
       << fmt17(c.goal[b.display_y_edge]) << "," << (c.flow_ok ? 1 : 0) << ","
       << (c.geodesic_ok ? 1 : 0) << "," << (c.lyapunov_decreasing ? 1 : 0) << ","
       << fmt17(c.flow.curve.t.back() - c.flow.curve.t.front()) << "," << fmt17(c.curve_energy)
       << "," << fmt17(c.geodesic_energy) << "," << fmt17(c.excess) << "," << c.note << "\n";
  }

  render_curves_svg(b, false, dir + "/trajectories.svg");
  render_curves_svg(b, true, dir + "/geodesics.svg");
  render_excess_svg(b, dir + "/excess.svg");
}

}  // namespace csmgeo
