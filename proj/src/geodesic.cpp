#include "csmgeo/geodesic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace csmgeo {

double Christoffel::at(int k, int i, int j) const {
  const int d = chart.dim;
  return gamma[(k * d + i) * d + j];
}

// dG[k] = central difference of the chart metric along chart direction k.
static std::vector<Eigen::MatrixXd> metric_derivatives(const Chart& chart,
                                                       const Eigen::VectorXd& u, double h) {
  std::vector<Eigen::MatrixXd> dG(chart.dim);
  for (int k = 0; k < chart.dim; k++) {
    Eigen::VectorXd up = u, um = u;
    up(k) += h;
    um(k) -= h;
    Eigen::MatrixXd Gp = metric_matrix_chart(chart, chart.machine_from_chart(up));
    Eigen::MatrixXd Gm = metric_matrix_chart(chart, chart.machine_from_chart(um));
    dG[k] = (Gp - Gm) / (2.0 * h);
  }
  return dG;
}

static std::vector<double> christoffel_at(const Chart& chart, const Eigen::VectorXd& u,
                                          double h) {
  const int d = chart.dim;
  Eigen::MatrixXd G = metric_matrix_chart(chart, chart.machine_from_chart(u));
  std::vector<Eigen::MatrixXd> dG = metric_derivatives(chart, u, h);
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("christoffel: chart metric not positive definite");
  std::vector<double> gamma(static_cast<size_t>(d) * d * d, 0.0);
  Eigen::MatrixXd rhs(d, d * d);  // column (i*d+j) holds the lower-index bracket
  for (int i = 0; i < d; i++)
    for (int j = 0; j < d; j++)
      for (int l = 0; l < d; l++)
        rhs(l, i * d + j) = 0.5 * (dG[i](j, l) + dG[j](i, l) - dG[l](i, j));
  Eigen::MatrixXd sol = llt.solve(rhs);
  for (int k = 0; k < d; k++)
    for (int i = 0; i < d; i++)
      for (int j = 0; j < d; j++) gamma[(k * d + i) * d + j] = sol(k, i * d + j);
  return gamma;
}

Christoffel christoffel(const Machine& m, const ChristoffelOptions& opts) {
  if (!m.interior()) throw std::invalid_argument("christoffel: requires an interior machine");
  Christoffel c;
  c.chart = Chart::make(m.dfa);
  Eigen::VectorXd u = c.chart.point_to_chart(m);
  if (c.chart.interior_margin(u) <= opts.boundary_margin)
    throw std::invalid_argument(
        "christoffel: point closer than the finite-difference margin to the face boundary");
  c.gamma = christoffel_at(c.chart, u, opts.fd_step);
  return c;
}

namespace {

struct GeodesicOde {
  const Chart& chart;
  double h;

  // y = (u, w); returns (w, -Gamma(u)[w, w]). Throws when a stage leaves the
  // face (the chart machine constructor rejects it).
  Eigen::VectorXd operator()(const Eigen::VectorXd& y) const {
    const int d = chart.dim;
    Eigen::VectorXd u = y.head(d), w = y.tail(d);
    std::vector<double> gamma = christoffel_at(chart, u, h);
    Eigen::VectorXd out(2 * d);
    out.head(d) = w;
    for (int k = 0; k < d; k++) {
      double acc = 0.0;
      for (int i = 0; i < d; i++)
        for (int j = 0; j < d; j++) acc += gamma[(k * d + i) * d + j] * w(i) * w(j);
      out(d + k) = -acc;
    }
    return out;
  }
};

}  // namespace

ExpMapResult exp_map(const Machine& m, const TangentVector& v, const ExpMapOptions& opts) {
  if (!m.interior()) throw std::invalid_argument("exp_map: requires an interior machine");
  Chart chart = Chart::make(m.dfa);
  const int d = chart.dim;
  GeodesicOde ode{chart, opts.fd_step};

  Eigen::VectorXd y(2 * d);
  y.head(d) = chart.point_to_chart(m);
  y.tail(d) = chart.tangent_to_chart(v);

  std::vector<double> ts = {0.0};
  std::vector<std::vector<double>> pts = {m.q};
  std::vector<double> speeds;
  auto g_speed = [&](const Eigen::VectorXd& yy) {
    Machine mm = chart.machine_from_chart(yy.head(d));
    TangentVector tv = chart.tangent_from_chart(yy.tail(d));
    return norm_g(mm, tv);
  };
  speeds.push_back(g_speed(y));

  ExpMapResult res;
  const double dt = 1.0 / opts.steps;
  double t = 0.0;
  for (int s = 0; s < opts.steps; s++) {
    Eigen::VectorXd ynew;
    try {
      Eigen::VectorXd k1 = ode(y);
      Eigen::VectorXd k2 = ode(y + 0.5 * dt * k1);
      Eigen::VectorXd k3 = ode(y + 0.5 * dt * k2);
      Eigen::VectorXd k4 = ode(y + dt * k3);
      ynew = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } catch (const std::exception&) {
      res.exited = true;  // a stage left the face
      break;
    }
    if (chart.interior_margin(ynew.head(d)) <= opts.boundary_margin) {
      res.exited = true;
      break;
    }
    y = ynew;
    t += dt;
    ts.push_back(t);
    pts.push_back(chart.machine_from_chart(y.head(d)).q);
    speeds.push_back(g_speed(y));
  }

  res.curve = Curve::make(m.dfa, std::move(ts), std::move(pts));
  double s0 = speeds.front(), drift = 0.0;
  if (s0 > 0.0)
    for (double s : speeds) drift = std::max(drift, std::abs(s - s0) / s0);
  res.speed_drift = drift;
  res.constant_speed = drift <= opts.speed_drift_tol;
  return res;
}

// Square-root-coordinate chord velocity: per state, the initial velocity of
// the great-circle arc between the square-rooted rows, mapped back through
// q = z^2. Exact for single-state machines, a good seed otherwise.
static TangentVector sqrt_chord_velocity(const Machine& from, const Machine& to) {
  std::vector<double> v(from.q.size(), 0.0);
  for (int j = 0; j < from.dfa.n_states; j++) {
    const auto& es = from.dfa.state_edges[j];
    double cos_th = 0.0;
    for (int e : es) cos_th += std::sqrt(from.q[e] * to.q[e]);
    cos_th = std::min(1.0, cos_th);
    double th = std::acos(cos_th);
    if (th < 1e-14) continue;
    double scale = 2.0 * th / std::sin(th);
    for (int e : es) {
      double z0 = std::sqrt(from.q[e]), z1 = std::sqrt(to.q[e]);
      v[e] = scale * z0 * (z1 - cos_th * z0);
    }
  }
  // Clean up rounding so the row-sum validation cannot trip.
  for (int j = 0; j < from.dfa.n_states; j++) {
    const auto& es = from.dfa.state_edges[j];
    double row = 0.0;
    for (int e : es) row += v[e];
    v[es.back()] -= row;
  }
  return TangentVector::make(from.dfa, std::move(v));
}

GeodesicResult geodesic_bvp(const Machine& from, const Machine& to, const GeodesicOptions& opts) {
  if (!from.dfa.same_type(to.dfa))
    throw std::invalid_argument("geodesic_bvp: machines have different types");
  if (!from.interior() || !to.interior())
    throw std::invalid_argument("geodesic_bvp: requires interior machines");

  Chart chart = Chart::make(from.dfa);
  const int d = chart.dim;

  GeodesicResult best;
  best.residual = std::numeric_limits<double>::infinity();

  if (d == 0) {  // zero-dimensional face: the two machines coincide
    best.converged = true;
    best.curve = Curve::make(from.dfa, {0.0, 1.0}, {from.q, to.q});
    best.v0 = TangentVector::make(from.dfa, std::vector<double>(from.q.size(), 0.0));
    best.energy = 0.0;
    best.residual = 0.0;
    best.starts_tried = 1;
    return best;
  }

  // Ambient max-norm endpoint mismatch of an integrated attempt.
  auto ambient_residual = [&](const ExpMapResult& r) {
    if (r.exited) return std::numeric_limits<double>::infinity();
    double res = 0.0;
    const auto& end = r.curve.points.back();
    for (size_t e = 0; e < end.size(); e++) res = std::max(res, std::abs(end[e] - to.q[e]));
    return res;
  };
  auto shoot = [&](const Eigen::VectorXd& w) {
    return exp_map(from, chart.tangent_from_chart(w), opts.exp_opts);
  };
  auto chart_residual = [&](const ExpMapResult& r) {
    Eigen::VectorXd res(d);
    const auto& end = r.curve.points.back();
    for (int i = 0; i < d; i++) res(i) = end[chart.kept[i]] - to.q[chart.kept[i]];
    return res;
  };

  std::vector<TangentVector> seeds;
  {
    std::vector<double> chord(from.q.size());
    for (size_t e = 0; e < from.q.size(); e++) chord[e] = to.q[e] - from.q[e];
    seeds.push_back(TangentVector::make(from.dfa, std::move(chord)));
    seeds.push_back(sqrt_chord_velocity(from, to));
  }

  for (const auto& seed : seeds) {
    best.starts_tried++;
    Eigen::VectorXd w = chart.tangent_to_chart(seed);
    ExpMapResult cur = shoot(w);
    double cur_res = ambient_residual(cur);
    for (int iter = 0; iter < opts.max_newton_iters && cur_res > opts.residual_tol; iter++) {
      if (cur.exited) break;  // seed overshoots the face; try the next seed
      Eigen::VectorXd r = chart_residual(cur);
      // Forward-difference Jacobian of the chart endpoint in the velocity.
      Eigen::MatrixXd J(d, d);
      double delta = 1e-7 * (1.0 + w.norm());
      bool jac_ok = true;
      for (int i = 0; i < d && jac_ok; i++) {
        Eigen::VectorXd wp = w;
        wp(i) += delta;
        ExpMapResult rp = shoot(wp);
        if (rp.exited) {
          jac_ok = false;
          break;
        }
        J.col(i) = (chart_residual(rp) - r) / delta;
      }
      if (!jac_ok) break;
      Eigen::VectorXd step = J.fullPivLu().solve(-r);
      // Backtracking line search on the ambient residual.
      double lambda = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 8; ls++, lambda *= 0.5) {
        ExpMapResult trial = shoot(w + lambda * step);
        double trial_res = ambient_residual(trial);
        if (trial_res < cur_res) {
          w += lambda * step;
          cur = std::move(trial);
          cur_res = trial_res;
          accepted = true;
          break;
        }
      }
      if (!accepted) break;  // stalled
    }
    if (cur_res < best.residual) {
      best.residual = cur_res;
      best.curve = cur.curve;
      best.v0 = chart.tangent_from_chart(w);
      best.energy = 0.5 * metric_apply(from, best.v0, best.v0);
      best.converged = cur_res <= opts.residual_tol;
    }
    if (best.converged) break;
  }
  best.message = best.converged
                     ? "converged"
                     : "no shooting start reached the endpoint tolerance (best residual " +
                           std::to_string(best.residual) + ")";
  return best;
}

PathDivergenceExcess path_divergence_excess(const Curve& c, const GeodesicOptions& opts) {
  PathDivergenceExcess out;
  out.curve_energy = curve_energy(c).value;
  GeodesicResult geo = geodesic_bvp(c.machine_at(0), c.machine_at(c.size() - 1), opts);
  out.geodesic_converged = geo.converged;
  out.geodesic_energy = geo.energy;
  out.excess = out.curve_energy - out.geodesic_energy;
  return out;
}

}  // namespace csmgeo
