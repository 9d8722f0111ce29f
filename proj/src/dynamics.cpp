#include "csmgeo/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "csmgeo/util.hpp"

namespace csmgeo {

TangentVector replicator_field(const Machine& m, const FitnessPotential& pot) {
  return sharp(m, pot.gradient(m));
}

TangentVector relent_replicator_field(const Machine& m, const Machine& goal) {
  if (!m.dfa.same_type(goal.dfa))
    throw std::invalid_argument("relent_replicator_field: machine types differ");
  std::vector<double> pi = stationary_state(m);
  std::vector<double> pi_goal = stationary_state(goal);
  std::vector<double> v(m.q.size());
  for (int e = 0; e < m.dfa.n_edges(); e++) {
    int j = m.dfa.edge_list[e].first;
    v[e] = pi_goal[j] / pi[j] * (goal.q[e] - m.q[e]);
  }
  return TangentVector::make(m.dfa, v);
}

TangentVector asymptotic_gwf_field(const Machine& m, const FitnessPotential& pot, int N,
                                   double beta, double rest_threshold) {
  if (N < 2) throw std::invalid_argument("asymptotic_gwf_field: N must be at least 2");
  if (!(beta > 0.0)) throw std::invalid_argument("asymptotic_gwf_field: beta must be positive");
  TangentVector v = sharp(m, pot.gradient(m));
  double n = norm_g(m, v);
  if (n < rest_threshold)
    throw FieldAtRest("asymptotic_gwf_field: gradient norm " + std::to_string(n) +
                      " below rest threshold");
  double scale = alpha_max_gauss(N) / std::sqrt(beta) / n;
  for (double& x : v.v) x *= scale;
  return v;
}

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

double alpha_max_gauss(int N) {
  if (N < 1 || N > 64) throw std::invalid_argument("alpha_max_gauss: N must lie in [1, 64]");
  if (N == 1) return 0.0;
  // E[max] = N 2^{3-N}/sqrt(2 pi) sum_{k odd <= N-1} C(N-1,k) J_k,
  // J_k = int_0^inf y exp(-y^2) erf(y)^k dy (integrand below 1e-27 past y=8).
  double sum = 0.0;
  for (int k = 1; k <= N - 1; k += 2) {
    double binom = 1.0;  // C(N-1, k)
    for (int i = 1; i <= k; i++) binom *= static_cast<double>(N - 1 - k + i) / i;
    auto f = [k](double y) { return y * std::exp(-y * y) * std::pow(std::erf(y), k); };
    sum += binom * integrate(f, 0.0, 8.0, 1e-14);
  }
  return N * std::pow(2.0, 3 - N) / std::sqrt(2.0 * M_PI) * sum;
}

std::string to_string(FlowTermination t) {
  switch (t) {
    case FlowTermination::rest: return "rest";
    case FlowTermination::boundary: return "boundary";
    case FlowTermination::time_limit: return "time_limit";
    case FlowTermination::step_limit: return "step_limit";
  }
  return "unknown";
}

namespace {

struct BoundaryExit {};

double min_coord(const std::vector<double>& q) {
  double m = 1.0;
  for (double x : q) m = std::min(m, x);
  return m;
}

// Renormalize each state's row in place; reject rows that lost positivity.
void renormalize_rows(const DfaType& dfa, std::vector<double>& q) {
  for (int j = 0; j < dfa.n_states; j++) {
    double s = 0.0;
    for (int e : dfa.state_edges[j]) s += q[e];
    if (!(s > 0.0) || !std::isfinite(s)) throw BoundaryExit{};
    for (int e : dfa.state_edges[j]) {
      q[e] /= s;
      if (q[e] <= 1e-15) throw BoundaryExit{};
    }
  }
}

}  // namespace

FlowCurve integrate_flow(const Machine& start, const VectorField& field,
                         const std::string& field_name, const FlowOptions& opts) {
  if (!start.interior()) throw std::invalid_argument("integrate_flow: start must be interior");
  const DfaType& dfa = start.dfa;
  const int E = dfa.n_edges();

  auto eval = [&](std::vector<double> p) {
    renormalize_rows(dfa, p);
    return field(Machine::make(dfa, p)).v;
  };
  auto rk4 = [&](const std::vector<double>& p, double h) {
    std::vector<double> k1 = eval(p), s(E);
    for (int e = 0; e < E; e++) s[e] = p[e] + 0.5 * h * k1[e];
    std::vector<double> k2 = eval(s);
    for (int e = 0; e < E; e++) s[e] = p[e] + 0.5 * h * k2[e];
    std::vector<double> k3 = eval(s);
    for (int e = 0; e < E; e++) s[e] = p[e] + h * k3[e];
    std::vector<double> k4 = eval(s);
    std::vector<double> y(E);
    for (int e = 0; e < E; e++)
      y[e] = p[e] + h / 6.0 * (k1[e] + 2.0 * k2[e] + 2.0 * k3[e] + k4[e]);
    return y;
  };

  std::vector<double> q = start.q;
  std::vector<double> ts{0.0};
  std::vector<std::vector<double>> pts{q};
  double t = 0.0, dt = opts.dt_init;
  long accepted = 0, attempts = 0;
  FlowTermination termination = FlowTermination::time_limit;

  // Step-doubling RK4: the half-step solution's local error is (y2-y1)/15.
  while (true) {
    if (t >= opts.t_max - 1e-15) {
      termination = FlowTermination::time_limit;
      break;
    }
    if (accepted >= opts.max_steps) {
      termination = FlowTermination::step_limit;
      break;
    }
    if (opts.dt_max > 0.0) dt = std::min(dt, opts.dt_max);
    double h = std::min(dt, opts.t_max - t);
    bool exited = false, rest = false;
    double err = 0.0;
    std::vector<double> y;
    try {
      std::vector<double> y1 = rk4(q, h);
      std::vector<double> y2 = rk4(rk4(q, 0.5 * h), 0.5 * h);
      for (int e = 0; e < E; e++) err = std::max(err, std::abs(y2[e] - y1[e]));
      y = y2;
      for (int e = 0; e < E; e++) y[e] += (y2[e] - y1[e]) / 15.0;
    } catch (const BoundaryExit&) {
      exited = true;
    } catch (const FieldAtRest&) {
      rest = true;
    }
    if (rest) {
      // A stage sampled the field's rest region, which may lie up to a full
      // step away from the base point. Shrink like a rejected step so rest is
      // only declared once the base point itself is at the region's edge.
      if (h <= 1e-8) {
        termination = FlowTermination::rest;
        break;
      }
      dt = 0.25 * h;
      attempts++;
      if (attempts > 8 * opts.max_steps) {
        termination = FlowTermination::step_limit;
        break;
      }
      continue;
    }
    if (exited || err > 15.0 * opts.local_tol) {
      dt = 0.5 * h;
      attempts++;
      if (dt < 1e-14 || attempts > 8 * opts.max_steps) {
        termination = exited ? FlowTermination::boundary : FlowTermination::step_limit;
        break;
      }
      continue;
    }
    try {
      renormalize_rows(dfa, y);
    } catch (const BoundaryExit&) {
      termination = FlowTermination::boundary;
      break;
    }
    t += h;
    q = y;
    accepted++;
    ts.push_back(t);
    pts.push_back(q);
    if (min_coord(q) < opts.boundary_margin) {
      termination = FlowTermination::boundary;
      break;
    }
    try {
      Machine m = Machine::make(dfa, q);
      if (norm_g(m, field(m)) < opts.rest_tol) {
        termination = FlowTermination::rest;
        break;
      }
    } catch (const FieldAtRest&) {
      termination = FlowTermination::rest;
      break;
    }
    double e = err / 15.0;
    double fac = e > 0.0 ? 0.9 * std::pow(opts.local_tol / e, 0.2) : 4.0;
    dt = h * std::min(4.0, std::max(0.25, fac));
  }

  if (ts.size() == 1) {  // terminated before any step: pad a constant segment
    ts.push_back(std::max(opts.dt_init, 1e-12));
    pts.push_back(pts.back());
  }

  FlowCurve fc;
  fc.curve = Curve::make(dfa, std::move(ts), std::move(pts));
  fc.termination = termination;
  fc.field_name = field_name;
  fc.meta["field"] = field_name;
  fc.meta["type"] = dfa.code();
  fc.meta["termination"] = to_string(termination);
  fc.meta["t_end"] = fmt17(t);
  fc.meta["steps_accepted"] = std::to_string(accepted);
  fc.meta["t_max"] = fmt17(opts.t_max);
  fc.meta["dt_init"] = fmt17(opts.dt_init);
  fc.meta["local_tol"] = fmt17(opts.local_tol);
  fc.meta["boundary_margin"] = fmt17(opts.boundary_margin);
  fc.meta["rest_tol"] = fmt17(opts.rest_tol);
  return fc;
}

void write_flow_csv(const FlowCurve& fc, const std::string& path) {
  write_curve_csv(fc.curve, path);
  std::ofstream out(path + ".meta");
  if (!out) throw std::runtime_error("write_flow_csv: cannot open " + path + ".meta");
  for (const auto& [k, v] : fc.meta) out << k << " = " << v << "\n";
}

StabilityReport stability_check(const Machine& candidate, const FitnessPotential& pot,
                                double radius, int n_samples) {
  if (!candidate.interior())
    throw std::invalid_argument("stability_check: candidate must be interior");
  if (!(radius > 0.0)) throw std::invalid_argument("stability_check: radius must be positive");
  Chart chart = Chart::make(candidate.dfa);
  const int d = chart.dim;
  StabilityReport rep;
  rep.n_samples = n_samples;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  if (d == 0) {  // zero-dimensional face: nothing can invade
    rep.stable = true;
    rep.worst_margin = 0.0;
    return rep;
  }
  Eigen::MatrixXd G = metric_matrix_chart(chart, candidate);
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("stability_check: metric not positive definite");
  // Map the Euclidean radius-ball through L^{-T} so samples fill the g-ball.
  Eigen::MatrixXd Linv_t = llt.matrixU().solve(Eigen::MatrixXd::Identity(d, d));
  Eigen::VectorXd u0 = chart.point_to_chart(candidate);

  int evaluated = 0;
  long index = 0;
  for (int s = 0; s < n_samples; s++) {
    Eigen::VectorXd x(d);
    while (true) {  // low-discrepancy cube points, rejected to the unit ball
      index++;
      if (index > 100000000)
        throw std::runtime_error("stability_check: ball rejection stalled (dimension too high)");
      double norm2 = 0.0;
      for (int i = 0; i < d; i++) {
        x(i) = 2.0 * halton(static_cast<uint64_t>(index), nth_prime(i)) - 1.0;
        norm2 += x(i) * x(i);
      }
      if (norm2 > 0.0 && norm2 <= 1.0) break;
    }
    Eigen::VectorXd u = u0 + Linv_t * (radius * x);
    if (chart.interior_margin(u) <= 1e-12) {
      rep.n_skipped++;
      continue;
    }
    Machine mp = chart.machine_from_chart(u);
    Covector eta = pot.gradient(mp);
    // Per state: the candidate row must outscore the sample row at the sample.
    for (int j = 0; j < candidate.dfa.n_states; j++) {
      double margin = 0.0;
      for (int e : candidate.dfa.state_edges[j])
        margin += (candidate.q[e] - mp.q[e]) * eta.eta[e];
      rep.worst_margin = std::min(rep.worst_margin, margin);
    }
    evaluated++;
  }
  rep.stable = evaluated > 0 && rep.worst_margin > 0.0;
  return rep;
}

}  // namespace csmgeo
