#pragma once
// Information geometry on a face: the relative entropy rate between machines
// of one type, the entropy-rate Riemannian metric it induces, and the
// index-raising map between covectors and tangent vectors.
//
// Ambient coordinates are the per-edge probabilities; tangent vectors have
// zero row sums per state. Charts eliminate the lexicographically last edge
// coordinate of every state.

#include <Eigen/Dense>
#include <vector>

#include "csmgeo/machine.hpp"

namespace csmgeo {

struct TangentVector {
  std::vector<double> v;  // per edge id; each state's entries sum to 0 (1e-12)
  static TangentVector make(const DfaType& dfa, std::vector<double> v);
};

// Ambient gradient representative; two representatives differing by per-state
// constant shifts act identically on tangent vectors.
struct Covector {
  std::vector<double> eta;
};

// h(target || base) = sum_j pi_j(target) sum_a target^{j,a} log(target^{j,a}/base^{j,a}).
// Requires identical types. Returns +infinity when base has a zero probability
// on an edge the target uses (support mismatch), never throws for that case.
double relative_entropy_rate(const Machine& target, const Machine& base);

// Shannon entropy rate in nats: -sum_j pi_j sum_a q^{j,a} log q^{j,a}.
double entropy_rate(const Machine& m);

// g(q)(v, w) = sum_{j,a} pi_j(q)/q^{j,a} * v^{j,a} w^{j,a}; interior machines only.
double metric_apply(const Machine& m, const TangentVector& v, const TangentVector& w);
double norm_g(const Machine& m, const TangentVector& v);

// Index raising: sharp(eta)^{j,a} = q^{j,a}/pi_j (eta_{j,a} - sum_b q^{j,b} eta_{j,b}).
TangentVector sharp(const Machine& m, const Covector& eta);

// Index lowering; returns the representative eta_{j,a} = pi_j v^{j,a}/q^{j,a}.
Covector flat(const Machine& m, const TangentVector& v);

// Per-state chart that drops each state's last edge coordinate.
struct Chart {
  DfaType dfa;
  std::vector<int> kept;           // chart index -> edge id
  std::vector<int> chart_of_edge;  // edge id -> chart index, -1 if eliminated
  int dim = 0;

  static Chart make(const DfaType& dfa);

  Eigen::VectorXd point_to_chart(const Machine& m) const;
  Machine machine_from_chart(const Eigen::VectorXd& u) const;
  Eigen::VectorXd tangent_to_chart(const TangentVector& v) const;
  TangentVector tangent_from_chart(const Eigen::VectorXd& w) const;

  // Smallest ambient edge coordinate of the chart point (including the
  // eliminated ones); positive iff the point is interior.
  double interior_margin(const Eigen::VectorXd& u) const;
};

// Metric Gram matrix in the chart at m.
Eigen::MatrixXd metric_matrix_chart(const Chart& chart, const Machine& m);

}  // namespace csmgeo
