#include "csmgeo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "csmgeo/util.hpp"

namespace csmgeo {

TangentVector TangentVector::make(const DfaType& dfa, std::vector<double> v) {
  if (static_cast<int>(v.size()) != dfa.n_edges())
    throw std::invalid_argument("tangent vector: wrong length");
  double scale = 1.0;  // row-sum tolerance is relative: tangent vectors carry arbitrary scale
  for (double x : v) scale = std::max(scale, std::abs(x));
  for (int j = 0; j < dfa.n_states; j++) {
    double row = 0.0;
    for (int e : dfa.state_edges[j]) row += v[e];
    if (std::abs(row) > kRowSumTol * scale)
      throw std::invalid_argument("tangent vector: state " + std::to_string(j) +
                                  " row sums to " + fmt17(row) + ", expected 0");
  }
  TangentVector t;
  t.v = std::move(v);
  return t;
}

static void require_interior(const Machine& m, const char* who) {
  if (!m.interior()) throw std::invalid_argument(std::string(who) + ": requires an interior machine");
}

double relative_entropy_rate(const Machine& target, const Machine& base) {
  if (!target.dfa.same_type(base.dfa))
    throw std::invalid_argument("relative_entropy_rate: machines have different types");
  std::vector<double> pi = stationary_state(target);
  double h = 0.0;
  for (int e = 0; e < target.dfa.n_edges(); e++) {
    double t = target.q[e];
    if (t == 0.0) continue;
    double b = base.q[e];
    if (b == 0.0) return std::numeric_limits<double>::infinity();
    h += pi[target.dfa.edge_list[e].first] * t * std::log(t / b);
  }
  return h;
}

double entropy_rate(const Machine& m) {
  std::vector<double> pi = stationary_state(m);
  double h = 0.0;
  for (int e = 0; e < m.dfa.n_edges(); e++) {
    double q = m.q[e];
    if (q > 0.0) h -= pi[m.dfa.edge_list[e].first] * q * std::log(q);
  }
  return h;
}

double metric_apply(const Machine& m, const TangentVector& v, const TangentVector& w) {
  require_interior(m, "metric_apply");
  std::vector<double> pi = stationary_state(m);
  double s = 0.0;
  for (int e = 0; e < m.dfa.n_edges(); e++)
    s += pi[m.dfa.edge_list[e].first] / m.q[e] * v.v[e] * w.v[e];
  return s;
}

double norm_g(const Machine& m, const TangentVector& v) {
  return std::sqrt(metric_apply(m, v, v));
}

TangentVector sharp(const Machine& m, const Covector& eta) {
  require_interior(m, "sharp");
  if (eta.eta.size() != m.q.size()) throw std::invalid_argument("sharp: covector length mismatch");
  std::vector<double> pi = stationary_state(m);
  std::vector<double> v(m.q.size());
  for (int j = 0; j < m.dfa.n_states; j++) {
    double mean = 0.0;
    for (int e : m.dfa.state_edges[j]) mean += m.q[e] * eta.eta[e];
    for (int e : m.dfa.state_edges[j]) v[e] = m.q[e] / pi[j] * (eta.eta[e] - mean);
  }
  return TangentVector::make(m.dfa, std::move(v));
}

Covector flat(const Machine& m, const TangentVector& v) {
  require_interior(m, "flat");
  std::vector<double> pi = stationary_state(m);
  Covector eta;
  eta.eta.resize(m.q.size());
  for (int e = 0; e < m.dfa.n_edges(); e++)
    eta.eta[e] = pi[m.dfa.edge_list[e].first] * v.v[e] / m.q[e];
  return eta;
}

Chart Chart::make(const DfaType& dfa) {
  Chart c;
  c.dfa = dfa;
  c.chart_of_edge.assign(dfa.n_edges(), -1);
  for (int j = 0; j < dfa.n_states; j++)
    for (size_t i = 0; i + 1 < dfa.state_edges[j].size(); i++) {
      int e = dfa.state_edges[j][i];
      c.chart_of_edge[e] = static_cast<int>(c.kept.size());
      c.kept.push_back(e);
    }
  c.dim = static_cast<int>(c.kept.size());
  return c;
}

Eigen::VectorXd Chart::point_to_chart(const Machine& m) const {
  Eigen::VectorXd u(dim);
  for (int i = 0; i < dim; i++) u(i) = m.q[kept[i]];
  return u;
}

Machine Chart::machine_from_chart(const Eigen::VectorXd& u) const {
  std::vector<double> q(dfa.n_edges(), 0.0);
  for (int i = 0; i < dim; i++) q[kept[i]] = u(i);
  for (int j = 0; j < dfa.n_states; j++) {
    double sum = 0.0;
    const auto& es = dfa.state_edges[j];
    for (size_t i = 0; i + 1 < es.size(); i++) sum += q[es[i]];
    q[es.back()] = 1.0 - sum;
  }
  return Machine::make(dfa, std::move(q));
}

Eigen::VectorXd Chart::tangent_to_chart(const TangentVector& v) const {
  Eigen::VectorXd w(dim);
  for (int i = 0; i < dim; i++) w(i) = v.v[kept[i]];
  return w;
}

TangentVector Chart::tangent_from_chart(const Eigen::VectorXd& w) const {
  std::vector<double> v(dfa.n_edges(), 0.0);
  for (int i = 0; i < dim; i++) v[kept[i]] = w(i);
  for (int j = 0; j < dfa.n_states; j++) {
    double sum = 0.0;
    const auto& es = dfa.state_edges[j];
    for (size_t i = 0; i + 1 < es.size(); i++) sum += v[es[i]];
    v[es.back()] = -sum;
  }
  return TangentVector::make(dfa, std::move(v));
}

double Chart::interior_margin(const Eigen::VectorXd& u) const {
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < dim; i++) margin = std::min(margin, u(i));
  for (int j = 0; j < dfa.n_states; j++) {
    double sum = 0.0;
    const auto& es = dfa.state_edges[j];
    for (size_t i = 0; i + 1 < es.size(); i++) sum += u(chart_of_edge[es[i]]);
    margin = std::min(margin, 1.0 - sum);
    if (es.size() == 1) margin = std::min(margin, 1.0);  // fixed unit coordinate
  }
  return margin;
}

Eigen::MatrixXd metric_matrix_chart(const Chart& chart, const Machine& m) {
  require_interior(m, "metric_matrix_chart");
  std::vector<double> pi = stationary_state(m);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(chart.dim, chart.dim);
  for (int j = 0; j < m.dfa.n_states; j++) {
    const auto& es = m.dfa.state_edges[j];
    if (es.size() < 2) continue;
    int last = es.back();
    double cross = pi[j] / m.q[last];  // from dq_last = -sum of kept dq
    for (size_t x = 0; x + 1 < es.size(); x++) {
      int ix = chart.chart_of_edge[es[x]];
      for (size_t y = 0; y + 1 < es.size(); y++) {
        int iy = chart.chart_of_edge[es[y]];
        G(ix, iy) += cross;
      }
      G(ix, ix) += pi[j] / m.q[es[x]];
    }
  }
  return G;
}

}  // namespace csmgeo
