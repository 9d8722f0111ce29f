#include "csmgeo/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace csmgeo {

FitnessPotential relent_goal_potential(const Machine& goal) {
  if (!goal.interior()) throw std::invalid_argument("relent_goal_potential: goal must be interior");
  std::vector<double> pi_goal = stationary_state(goal);
  FitnessPotential pot;
  pot.name = "relent_goal";
  pot.value = [goal](const Machine& m) { return -relative_entropy_rate(goal, m); };
  pot.gradient = [goal, pi_goal](const Machine& m) {
    if (!m.dfa.same_type(goal.dfa))
      throw std::invalid_argument("relent_goal gradient: machine type differs from the goal");
    if (!m.interior()) throw std::invalid_argument("relent_goal gradient: requires interior machine");
    Covector eta;
    eta.eta.resize(m.q.size());
    for (int e = 0; e < m.dfa.n_edges(); e++)
      eta.eta[e] = pi_goal[m.dfa.edge_list[e].first] * goal.q[e] / m.q[e];
    return eta;
  };
  return pot;
}

FitnessPotential linear_payoff_potential(const DfaType& dfa, std::vector<double> r) {
  if (static_cast<int>(r.size()) != dfa.n_edges())
    throw std::invalid_argument("linear_payoff_potential: coefficient length mismatch");
  FitnessPotential pot;
  pot.name = "linear_payoff";
  pot.value = [r](const Machine& m) {
    double s = 0.0;
    for (size_t e = 0; e < r.size(); e++) s += r[e] * m.q[e];
    return s;
  };
  pot.gradient = [r](const Machine&) {
    Covector eta;
    eta.eta = r;
    return eta;
  };
  return pot;
}

FitnessPotential quadratic_payoff_potential(const DfaType& dfa,
                                            std::vector<std::vector<double>> R) {
  const size_t E = dfa.n_edges();
  if (R.size() != E) throw std::invalid_argument("quadratic_payoff_potential: matrix size mismatch");
  for (size_t i = 0; i < E; i++) {
    if (R[i].size() != E)
      throw std::invalid_argument("quadratic_payoff_potential: matrix size mismatch");
    for (size_t j = 0; j < E; j++)
      if (std::abs(R[i][j] - R[j][i]) > 1e-12)
        throw std::invalid_argument("quadratic_payoff_potential: matrix must be symmetric");
  }
  FitnessPotential pot;
  pot.name = "quadratic_payoff";
  pot.value = [R, E](const Machine& m) {
    double s = 0.0;
    for (size_t i = 0; i < E; i++)
      for (size_t j = 0; j < E; j++) s += 0.5 * m.q[i] * R[i][j] * m.q[j];
    return s;
  };
  pot.gradient = [R, E](const Machine& m) {
    Covector eta;
    eta.eta.assign(E, 0.0);
    for (size_t i = 0; i < E; i++)
      for (size_t j = 0; j < E; j++) eta.eta[i] += R[i][j] * m.q[j];
    return eta;
  };
  return pot;
}

FitnessPotential fd_potential(const DfaType& dfa, std::string name,
                              std::function<double(const Machine&)> value) {
  Chart chart = Chart::make(dfa);
  FitnessPotential pot;
  pot.name = std::move(name);
  pot.value = value;
  pot.gradient = [chart, value](const Machine& m) {
    const double h = 1e-6;
    Eigen::VectorXd u = chart.point_to_chart(m);
    Covector eta;
    eta.eta.assign(m.q.size(), 0.0);  // eliminated components fixed at zero
    for (int i = 0; i < chart.dim; i++) {
      Eigen::VectorXd up = u, um = u;
      up(i) += h;
      um(i) -= h;
      eta.eta[chart.kept[i]] =
          (value(chart.machine_from_chart(up)) - value(chart.machine_from_chart(um))) / (2.0 * h);
    }
    return eta;
  };
  return pot;
}

void check_potential_gradient(const FitnessPotential& pot, const Machine& m, RngStream& rng,
                              int n_directions, double rel_tol) {
  const double h = 1e-6;
  Covector eta = pot.gradient(m);
  Chart chart = Chart::make(m.dfa);
  for (int d = 0; d < n_directions; d++) {
    Eigen::VectorXd w(chart.dim);
    for (int i = 0; i < chart.dim; i++) w(i) = rng.uniform(-1.0, 1.0);
    double wn = w.norm();
    if (wn == 0.0) continue;
    w /= wn;
    TangentVector v = chart.tangent_from_chart(w);
    double analytic = 0.0;
    for (size_t e = 0; e < v.v.size(); e++) analytic += eta.eta[e] * v.v[e];
    std::vector<double> qp = m.q, qm = m.q;
    for (size_t e = 0; e < v.v.size(); e++) {
      qp[e] += h * v.v[e];
      qm[e] -= h * v.v[e];
    }
    double fd = (pot.value(Machine::make(m.dfa, qp)) - pot.value(Machine::make(m.dfa, qm))) / (2.0 * h);
    double scale = std::max({std::abs(analytic), std::abs(fd), 1e-12});
    if (std::abs(analytic - fd) / scale > rel_tol)
      throw std::runtime_error("potential '" + pot.name + "': gradient disagrees with finite " +
                               "difference (analytic " + std::to_string(analytic) + ", fd " +
                               std::to_string(fd) + ")");
  }
}

}  // namespace csmgeo
