#include "csmgeo/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "csmgeo/rational.hpp"
#include "csmgeo/util.hpp"

namespace csmgeo {

namespace {

struct Masses {
  std::vector<long> out_mass, in_mass;
  std::vector<int> support;  // states with any incident count, ascending
  bool connected = false;    // support weakly connected
  bool balanced = false;     // every support state has out == in
  int init_state = -1, term_state = -1;
  bool admissible = false;
};

Masses analyze_counts(const DfaType& dfa, const std::vector<long>& c) {
  Masses ms;
  const int n = dfa.n_states;
  ms.out_mass.assign(n, 0);
  ms.in_mass.assign(n, 0);
  for (int e = 0; e < dfa.n_edges(); e++) {
    if (c[e] < 0) throw std::invalid_argument("empirical counts must be non-negative");
    ms.out_mass[dfa.edge_list[e].first] += c[e];
    ms.in_mass[dfa.edge_target(e)] += c[e];
  }
  for (int j = 0; j < n; j++)
    if (ms.out_mass[j] > 0 || ms.in_mass[j] > 0) ms.support.push_back(j);
  if (ms.support.empty()) return ms;

  // weak connectivity of the support graph
  std::vector<int> comp(n, -1);
  std::vector<int> stack{ms.support[0]};
  comp[ms.support[0]] = 0;
  while (!stack.empty()) {
    int j = stack.back();
    stack.pop_back();
    for (int e = 0; e < dfa.n_edges(); e++) {
      if (c[e] == 0) continue;
      int u = dfa.edge_list[e].first, v = dfa.edge_target(e);
      if (u == j && comp[v] < 0) {
        comp[v] = 0;
        stack.push_back(v);
      }
      if (v == j && comp[u] < 0) {
        comp[u] = 0;
        stack.push_back(u);
      }
    }
  }
  ms.connected = true;
  for (int j : ms.support)
    if (comp[j] < 0) ms.connected = false;

  int plus = -1, minus = -1, bad = 0;
  ms.balanced = true;
  for (int j : ms.support) {
    long d = ms.out_mass[j] - ms.in_mass[j];
    if (d == 0) continue;
    ms.balanced = false;
    if (d == 1 && plus < 0)
      plus = j;
    else if (d == -1 && minus < 0)
      minus = j;
    else
      bad = 1;
  }
  if (!ms.connected || bad) return ms;
  if (ms.balanced) {
    ms.init_state = ms.term_state = ms.support[0];
    ms.admissible = true;
  } else if (plus >= 0 && minus >= 0) {
    ms.init_state = plus;
    ms.term_state = minus;
    ms.admissible = true;
  }
  return ms;
}

BigInt det_bareiss(std::vector<std::vector<BigInt>> a) {
  const int n = static_cast<int>(a.size());
  if (n == 0) return 1;
  BigInt sign = 1, prev = 1;
  for (int k = 0; k + 1 < n; k++) {
    if (a[k][k] == 0) {
      int piv = -1;
      for (int i = k + 1; i < n; i++)
        if (a[i][k] != 0) {
          piv = i;
          break;
        }
      if (piv < 0) return 0;
      std::swap(a[k], a[piv]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; i++)
      for (int j = k + 1; j < n; j++)
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

// Spanning in-trees of the count multigraph toward root (matrix-tree theorem
// on the out-degree Laplacian, principal minor at the root).
BigInt in_trees(const DfaType& dfa, const std::vector<long>& c, const Masses& ms, int root) {
  std::vector<int> idx(dfa.n_states, -1);
  int n = 0;
  for (int j : ms.support)
    if (j != root) idx[j] = n++;
  if (n == 0) return 1;  // single-vertex support
  std::vector<std::vector<BigInt>> M(n, std::vector<BigInt>(n, 0));
  for (int j : ms.support)
    if (j != root) M[idx[j]][idx[j]] = ms.out_mass[j];
  for (int e = 0; e < dfa.n_edges(); e++) {
    if (c[e] == 0) continue;
    int u = dfa.edge_list[e].first, v = dfa.edge_target(e);
    if (u == root || v == root || u == v) continue;  // loops never enter trees
    M[idx[u]][idx[v]] -= c[e];
  }
  // loops at non-root vertices also cancel from the diagonal
  for (int e = 0; e < dfa.n_edges(); e++) {
    if (c[e] == 0) continue;
    int u = dfa.edge_list[e].first;
    if (u == dfa.edge_target(e) && u != root) M[idx[u]][idx[u]] -= c[e];
  }
  return det_bareiss(std::move(M));
}

BigInt factorial(long n) {
  BigInt f = 1;
  for (long i = 2; i <= n; i++) f *= i;
  return f;
}

// Orderings of the edge copies forming one trail from `start`, given the
// admissibility analysis.
BigInt trails_from(const DfaType& dfa, const std::vector<long>& c, const Masses& ms, int start) {
  if (!ms.admissible) return 0;
  BigInt num;
  if (ms.balanced) {
    if (ms.out_mass[start] == 0) return 0;
    num = BigInt(ms.out_mass[start]) * in_trees(dfa, c, ms, start);
    for (int j : ms.support) num *= factorial(ms.out_mass[j] - 1);
  } else {
    if (start != ms.init_state) return 0;
    num = in_trees(dfa, c, ms, ms.term_state) * factorial(ms.out_mass[ms.term_state]);
    for (int j : ms.support)
      if (j != ms.term_state) num *= factorial(ms.out_mass[j] - 1);
  }
  BigInt den = 1;
  for (int e = 0; e < dfa.n_edges(); e++) den *= factorial(c[e]);
  BigInt quot = num / den;
  if (quot * den != num) throw std::logic_error("trail count not divisible by copy permutations");
  return quot;
}

BigRational pow_rat(const BigRational& base, long e) {
  BigRational r = 1, b = base;
  long k = e;
  while (k > 0) {
    if (k & 1) r *= b;
    b *= b;
    k >>= 1;
  }
  return r;
}

std::vector<BigRational> exact_probs(const Machine& m) {
  if (m.q_exact.empty())
    throw std::invalid_argument("exact ensemble computation requires probability literals");
  std::vector<BigRational> q(m.q.size());
  for (size_t e = 0; e < m.q.size(); e++) q[e] = rational_from_literal(m.q_exact[e]);
  return q;
}

// Exact stationary distribution: solve pi P = pi with total mass 1.
std::vector<BigRational> stationary_exact(const Machine& m, const std::vector<BigRational>& q) {
  const int n = m.dfa.n_states;
  std::vector<std::vector<BigRational>> A(n, std::vector<BigRational>(n + 1, 0));
  for (int k = 0; k < n - 1; k++) {  // (P^T - I) pi = 0, first n-1 rows
    for (int e = 0; e < m.dfa.n_edges(); e++)
      if (m.dfa.edge_target(e) == k) A[k][m.dfa.edge_list[e].first] += q[e];
    A[k][k] -= 1;
  }
  for (int j = 0; j < n; j++) A[n - 1][j] = 1;  // normalization
  A[n - 1][n] = 1;
  for (int col = 0; col < n; col++) {  // exact Gauss-Jordan
    int piv = -1;
    for (int r = col; r < n; r++)
      if (A[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) throw std::runtime_error("stationary_exact: singular system");
    std::swap(A[col], A[piv]);
    BigRational p = A[col][col];
    for (int cc = col; cc <= n; cc++) A[col][cc] /= p;
    for (int r = 0; r < n; r++) {
      if (r == col || A[r][col] == 0) continue;
      BigRational f = A[r][col];
      for (int cc = col; cc <= n; cc++) A[r][cc] -= f * A[col][cc];
    }
  }
  std::vector<BigRational> pi(n);
  for (int j = 0; j < n; j++) pi[j] = A[j][n];
  return pi;
}

std::vector<BigRational> realized_coords(const DfaType& dfa, const std::vector<long>& c,
                                         const std::vector<long>& out_mass) {
  std::vector<BigRational> coords(dfa.n_edges());
  for (int e = 0; e < dfa.n_edges(); e++) {
    int j = dfa.edge_list[e].first;
    coords[e] = out_mass[j] > 0 ? BigRational(c[e], out_mass[j]) : BigRational(-1);
  }
  return coords;
}

BigInt compositions_count(long L, int parts) {  // C(L + parts - 1, parts - 1)
  BigInt num = 1, den = 1;
  for (int i = 1; i <= parts - 1; i++) {
    num *= L + i;
    den *= i;
  }
  return num / den;
}

// log of a positive big integer without overflowing double
double log_big(const BigInt& x) {
  if (x <= 0) throw std::domain_error("log_big: non-positive argument");
  if (x < (BigInt(1) << 900)) return std::log(x.convert_to<double>());
  auto b = boost::multiprecision::msb(x);
  BigInt y = x >> (b - 52);
  return std::log(y.convert_to<double>()) + static_cast<double>(b - 52) * std::log(2.0);
}

}  // namespace

std::vector<EmpiricalType> enumerate_empirical_types(const DfaType& dfa, long L, uint64_t cap) {
  if (L < 1) throw std::invalid_argument("enumerate_empirical_types: L must be at least 1");
  const int E = dfa.n_edges();
  BigInt total = compositions_count(L, E);
  if (total > cap) {
    std::ostringstream msg;
    msg << "enumerate_empirical_types: " << total << " count vectors exceed the cap " << cap;
    throw std::runtime_error(msg.str());
  }
  std::vector<EmpiricalType> out;
  std::vector<long> c(E, 0);
  // odometer over compositions of L into E parts
  std::function<void(int, long)> rec = [&](int pos, long rem) {
    if (pos == E - 1) {
      c[pos] = rem;
      Masses ms = analyze_counts(dfa, c);
      if (ms.admissible) {
        EmpiricalType t;
        t.counts = c;
        t.L = L;
        t.is_cycle = ms.balanced;
        t.init_state = ms.init_state;
        t.term_state = ms.term_state;
        out.push_back(std::move(t));
      }
      return;
    }
    for (long v = 0; v <= rem; v++) {
      c[pos] = v;
      rec(pos + 1, rem - v);
    }
  };
  rec(0, L);
  return out;
}

BigInt count_euler_trails_from(const DfaType& dfa, const EmpiricalType& x, int start_state) {
  Masses ms = analyze_counts(dfa, x.counts);
  if (start_state < 0 || start_state >= dfa.n_states) return 0;
  return trails_from(dfa, x.counts, ms, start_state);
}

BigInt count_euler_trails(const DfaType& dfa, const EmpiricalType& x) {
  Masses ms = analyze_counts(dfa, x.counts);
  if (!ms.admissible) return 0;
  if (!ms.balanced) return trails_from(dfa, x.counts, ms, ms.init_state);
  BigInt total = 0;
  for (int s : ms.support) total += trails_from(dfa, x.counts, ms, s);
  return total;
}

ExactDistribution exact_ensemble_distribution(const Machine& q, long L) {
  std::vector<BigRational> qr = exact_probs(q);
  std::vector<BigRational> pi = stationary_exact(q, qr);
  std::vector<EmpiricalType> types = enumerate_empirical_types(q.dfa, L);
  std::map<std::vector<BigRational>, BigRational> agg;
  for (const EmpiricalType& x : types) {
    Masses ms = analyze_counts(q.dfa, x.counts);
    BigRational weight = 0;
    if (ms.balanced) {
      for (int s : ms.support) weight += pi[s] * BigRational(trails_from(q.dfa, x.counts, ms, s));
    } else {
      weight = pi[ms.init_state] * BigRational(trails_from(q.dfa, x.counts, ms, ms.init_state));
    }
    if (weight == 0) continue;
    BigRational p = weight;
    for (int e = 0; e < q.dfa.n_edges(); e++)
      if (x.counts[e] > 0) p *= pow_rat(qr[e], x.counts[e]);
    if (p == 0) continue;
    agg[realized_coords(q.dfa, x.counts, ms.out_mass)] += p;
  }
  ExactDistribution dist;
  dist.dfa = q.dfa;
  dist.L = L;
  BigRational mass = 0;
  for (auto& [coords, p] : agg) {
    dist.entries.push_back({coords, p});
    mass += p;
  }
  if (mass != 1) throw std::logic_error("exact_ensemble_distribution: mass does not close to 1");
  return dist;
}

ExactDistribution path_enumeration_distribution(const Machine& q, long L) {
  if (L < 1) throw std::invalid_argument("path_enumeration_distribution: L must be at least 1");
  std::vector<BigRational> qr = exact_probs(q);
  std::vector<BigRational> pi = stationary_exact(q, qr);
  const DfaType& dfa = q.dfa;
  std::map<std::vector<BigRational>, BigRational> agg;
  std::vector<long> counts(dfa.n_edges(), 0);
  std::vector<long> out_mass(dfa.n_states, 0);
  std::function<void(int, long, BigRational)> rec = [&](int state, long depth, BigRational p) {
    if (depth == L) {
      agg[realized_coords(dfa, counts, out_mass)] += p;
      return;
    }
    for (int e : dfa.state_edges[state]) {
      if (qr[e] == 0) continue;
      counts[e]++;
      out_mass[state]++;
      rec(dfa.edge_target(e), depth + 1, p * qr[e]);
      counts[e]--;
      out_mass[state]--;
    }
  };
  for (int s = 0; s < dfa.n_states; s++)
    if (pi[s] != 0) rec(s, 0, pi[s]);
  ExactDistribution dist;
  dist.dfa = dfa;
  dist.L = L;
  BigRational mass = 0;
  for (auto& [coords, p] : agg) {
    dist.entries.push_back({coords, p});
    mass += p;
  }
  if (mass != 1) throw std::logic_error("path_enumeration_distribution: mass does not close to 1");
  return dist;
}

std::vector<TypeLogProb> ensemble_log_distribution(const Machine& q, long L, uint64_t cap) {
  std::vector<double> pi = stationary_state(q);
  std::vector<EmpiricalType> types = enumerate_empirical_types(q.dfa, L, cap);
  std::vector<TypeLogProb> out;
  out.reserve(types.size());
  for (EmpiricalType& x : types) {
    Masses ms = analyze_counts(q.dfa, x.counts);
    bool possible = true;
    double log_q = 0.0;
    for (int e = 0; e < q.dfa.n_edges(); e++) {
      if (x.counts[e] == 0) continue;
      if (q.q[e] <= 0.0) {
        possible = false;
        break;
      }
      log_q += static_cast<double>(x.counts[e]) * std::log(q.q[e]);
    }
    if (!possible) continue;
    double log_w;
    if (ms.balanced) {
      double start_mass = 0.0;
      for (int s : ms.support) start_mass += pi[s] * static_cast<double>(ms.out_mass[s]);
      log_w = std::log(start_mass) + log_big(in_trees(q.dfa, x.counts, ms, ms.support[0]));
      for (int j : ms.support) log_w += std::lgamma(static_cast<double>(ms.out_mass[j]));
    } else {
      log_w = std::log(pi[ms.init_state]) +
              log_big(in_trees(q.dfa, x.counts, ms, ms.term_state)) +
              std::lgamma(static_cast<double>(ms.out_mass[ms.term_state]) + 1.0);
      for (int j : ms.support)
        if (j != ms.term_state) log_w += std::lgamma(static_cast<double>(ms.out_mass[j]));
    }
    for (int e = 0; e < q.dfa.n_edges(); e++)
      log_w -= std::lgamma(static_cast<double>(x.counts[e]) + 1.0);
    out.push_back({std::move(x), log_w + log_q});
  }
  return out;
}

LdpReport ldp_rate_check(const Machine& q, const Machine& target, const std::vector<long>& Ls) {
  if (!q.dfa.same_type(target.dfa))
    throw std::invalid_argument("ldp_rate_check: machine types differ");
  if (!q.interior()) throw std::invalid_argument("ldp_rate_check: base machine must be interior");
  std::vector<double> pi_q = stationary_state(q);
  LdpReport rep;
  for (long L : Ls) {
    std::vector<TypeLogProb> types = ensemble_log_distribution(q, L);
    std::map<std::vector<BigRational>, LogAccumulator> interior_acc;
    std::map<std::vector<BigRational>, LogAccumulator> all_acc;
    for (const TypeLogProb& t : types) {
      Masses ms = analyze_counts(q.dfa, t.x.counts);
      std::vector<BigRational> key = realized_coords(q.dfa, t.x.counts, ms.out_mass);
      all_acc[key].add(t.log_prob);
      bool interior = true;
      for (long c : t.x.counts)
        if (c == 0) interior = false;
      if (interior) interior_acc[key].add(t.log_prob);
    }
    if (interior_acc.empty())
      throw std::runtime_error("ldp_rate_check: no fully supported realization at L=" +
                               std::to_string(L));
    LdpRow row;
    row.L = L;
    row.support_size = all_acc.size();
    double best_d2 = std::numeric_limits<double>::infinity();
    for (const auto& [key, acc] : interior_acc) {
      std::vector<double> r(key.size());
      double d2 = 0.0;
      for (size_t e = 0; e < key.size(); e++) {
        r[e] = key[e].convert_to<double>();
        int j = q.dfa.edge_list[e].first;
        double d = r[e] - target.q[e];
        d2 += pi_q[j] / q.q[e] * d * d;
      }
      if (d2 < best_d2) {
        best_d2 = d2;
        row.nearest = std::move(r);
        row.rate = -acc.log_sum / static_cast<double>(L);
      }
    }
    row.entropy_rate_ref = relative_entropy_rate(Machine::make(q.dfa, row.nearest), q);
    row.rel_err = row.entropy_rate_ref > 1e-300
                      ? std::abs(row.rate - row.entropy_rate_ref) / row.entropy_rate_ref
                      : std::abs(row.rate - row.entropy_rate_ref);
    rep.rows.push_back(std::move(row));
  }
  rep.monotone_decreasing = rep.rows.size() >= 2;
  for (size_t i = 1; i < rep.rows.size(); i++)
    if (rep.rows[i].rel_err > rep.rows[i - 1].rel_err) rep.monotone_decreasing = false;
  return rep;
}

CltReport clt_covariance_check(const Machine& q, long L, long n_samples, uint64_t seed) {
  if (!q.interior()) throw std::invalid_argument("clt_covariance_check: machine must be interior");
  if (n_samples < 2) throw std::invalid_argument("clt_covariance_check: need n_samples >= 2");
  Chart chart = Chart::make(q.dfa);
  const int d = chart.dim;
  Eigen::MatrixXd G = metric_matrix_chart(chart, q);
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("clt_covariance_check: metric not positive definite");
  Eigen::MatrixXd Lmat = llt.matrixL();
  Eigen::VectorXd u0 = chart.point_to_chart(q);
  const double sqrtL = std::sqrt(static_cast<double>(L));

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd sumsq = Eigen::MatrixXd::Zero(d, d);
  long kept = 0;
  CltReport rep;
  rep.L = L;
  rep.n_samples = n_samples;
  for (long i = 0; i < n_samples; i++) {
    RngStream rng(derive_seed(seed, static_cast<uint64_t>(i)));
    std::vector<long> counts = sample_edge_counts(q, L, rng);
    std::vector<long> mass(q.dfa.n_states, 0);
    for (int e = 0; e < q.dfa.n_edges(); e++) mass[q.dfa.edge_list[e].first] += counts[e];
    bool ok = true;
    for (long m : mass)
      if (m == 0) ok = false;
    if (!ok) {
      rep.n_dropped++;
      continue;
    }
    Eigen::VectorXd u(d);
    for (int k = 0; k < d; k++) {
      int e = chart.kept[k];
      u(k) = static_cast<double>(counts[e]) / static_cast<double>(mass[q.dfa.edge_list[e].first]);
    }
    Eigen::VectorXd cvec = Lmat.transpose() * (sqrtL * (u - u0));
    sum += cvec;
    sumsq += cvec * cvec.transpose();
    kept++;
  }
  if (kept < 2) throw std::runtime_error("clt_covariance_check: too many degenerate draws");
  rep.dropped_ok = rep.n_dropped * 100 <= n_samples;
  Eigen::VectorXd mean = sum / static_cast<double>(kept);
  Eigen::MatrixXd cov =
      (sumsq - static_cast<double>(kept) * mean * mean.transpose()) / static_cast<double>(kept - 1);
  rep.mean.assign(mean.data(), mean.data() + d);
  rep.covariance.assign(d, std::vector<double>(d));
  for (int i = 0; i < d; i++)
    for (int j = 0; j < d; j++) {
      rep.covariance[i][j] = cov(i, j);
      double ref = i == j ? 1.0 : 0.0;
      rep.max_cov_dev = std::max(rep.max_cov_dev, std::abs(cov(i, j) - ref));
    }
  for (int i = 0; i < d; i++) rep.max_mean_dev = std::max(rep.max_mean_dev, std::abs(mean(i)));
  return rep;
}

ExactCltMoments exact_clt_moments(const Machine& q, long L) {
  if (!q.interior()) throw std::invalid_argument("exact_clt_moments: machine must be interior");
  if (L < 2) throw std::invalid_argument("exact_clt_moments: need L >= 2");
  const DfaType& dfa = q.dfa;
  if (dfa.n_states != 2)
    throw std::invalid_argument("exact_clt_moments: two-state machines only");
  int stay[2] = {-1, -1}, leave[2] = {-1, -1};
  for (int e = 0; e < dfa.n_edges(); e++) {
    int j = dfa.edge_list[e].first;
    (dfa.edge_target(e) == j ? stay[j] : leave[j]) = e;
  }
  for (int j = 0; j < 2; j++)
    if (stay[j] < 0 || leave[j] < 0)
      throw std::invalid_argument("exact_clt_moments: need a stay and a crossing edge per state");

  Chart chart = Chart::make(dfa);
  Eigen::MatrixXd G = metric_matrix_chart(chart, q);
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("exact_clt_moments: metric not positive definite");
  Eigen::Matrix2d Lt = Eigen::MatrixXd(llt.matrixL()).transpose();
  Eigen::Vector2d u0 = chart.point_to_chart(q);
  const double sqrtL = std::sqrt(static_cast<double>(L));
  std::vector<double> pi = stationary_state(q);

  const double lpi[2] = {std::log(pi[0]), std::log(pi[1])};
  const double llv[2] = {std::log(q.q[leave[0]]), std::log(q.q[leave[1]])};
  const double lst[2] = {std::log(q.q[stay[0]]), std::log(q.q[stay[1]])};

  std::vector<double> lf(static_cast<size_t>(L) + 1, 0.0);
  for (long k = 1; k <= L; k++) lf[k] = lf[k - 1] + std::log(static_cast<double>(k));
  const double neg_inf = -std::numeric_limits<double>::infinity();
  auto lchoose = [&](long n, long k) {
    return (k < 0 || k > n) ? neg_inf : lf[n] - lf[k] - lf[n - k];
  };

  ExactCltMoments out;
  out.L = L;
  // Paths that never cross: the other state emits nothing and its row is
  // undefined, matching the draws the sampled check drops.
  for (int j = 0; j < 2; j++) out.dropped_mass += std::exp(lpi[j] + (L - 1) * lst[j]);

  double mass = 0.0;
  Eigen::Vector2d s1 = Eigen::Vector2d::Zero();
  Eigen::Matrix2d s2 = Eigen::Matrix2d::Zero();
  long n[4] = {0, 0, 0, 0};  // per-edge counts of the current outcome
  double vis[2];
  auto add = [&](double lw) {
    double w = std::exp(lw);
    if (w == 0.0) return;
    Eigen::Vector2d u;
    for (int k = 0; k < 2; k++) {
      int e = chart.kept[k];
      u(k) = static_cast<double>(n[e]) / vis[dfa.edge_list[e].first];
    }
    Eigen::Vector2d cvec = Lt * (sqrtL * (u - u0));
    mass += w;
    s1 += w * cvec;
    s2 += w * cvec * cvec.transpose();
  };

  // The emitting states form a binary sequence: fix the start state i, the
  // last emitting state e, the visit split (v0, v1) and the number a of
  // internal 0->1 crossings. The 1->0 count b and the run counts follow, the
  // arrangements are products of compositions, and every edge count is
  // pinned except the final symbol, a free draw from row e.
  for (long v0 = 1; v0 <= L - 1; v0++) {
    long v1 = L - v0;
    vis[0] = static_cast<double>(v0);
    vis[1] = static_cast<double>(v1);
    for (int i = 0; i < 2; i++) {
      for (int e = 0; e < 2; e++) {
        for (long a = 0; a <= std::min(v0, v1) + 1; a++) {
          long b;
          double lruns;
          if (i == 0 && e == 0) {
            b = a;
            lruns = lchoose(v0 - 1, a) + lchoose(v1 - 1, a - 1);
          } else if (i == 0 && e == 1) {
            b = a - 1;
            lruns = lchoose(v0 - 1, a - 1) + lchoose(v1 - 1, a - 1);
          } else if (i == 1 && e == 0) {
            b = a + 1;
            lruns = lchoose(v0 - 1, a) + lchoose(v1 - 1, b - 1);
          } else {
            b = a;
            lruns = lchoose(v0 - 1, a - 1) + lchoose(v1 - 1, b);
          }
          long t00 = (v0 - (e == 0 ? 1 : 0)) - a;  // internal stays at 0
          long t11 = (v1 - (e == 1 ? 1 : 0)) - b;
          if (b < 0 || t00 < 0 || t11 < 0 || lruns == neg_inf) continue;
          double lw =
              lpi[i] + lruns + a * llv[0] + t00 * lst[0] + b * llv[1] + t11 * lst[1];
          n[stay[0]] = t00;
          n[leave[0]] = a;
          n[stay[1]] = t11;
          n[leave[1]] = b;
          n[stay[e]] += 1;
          add(lw + lst[e]);
          n[stay[e]] -= 1;
          n[leave[e]] += 1;
          add(lw + llv[e]);
        }
      }
    }
  }

  s1 /= mass;
  s2 /= mass;
  Eigen::Matrix2d cov = s2 - s1 * s1.transpose();
  out.mean.assign(s1.data(), s1.data() + 2);
  out.covariance.assign(2, std::vector<double>(2));
  for (int i = 0; i < 2; i++)
    for (int j = 0; j < 2; j++) {
      out.covariance[i][j] = cov(i, j);
      double ref = i == j ? 1.0 : 0.0;
      out.max_cov_dev = std::max(out.max_cov_dev, std::abs(cov(i, j) - ref));
    }
  for (int i = 0; i < 2; i++) out.max_mean_dev = std::max(out.max_mean_dev, std::abs(s1(i)));
  return out;
}

void write_distribution_csv(const ExactDistribution& dist, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write distribution csv: " + path);
  for (const auto& [j, a] : dist.dfa.edge_list)
    f << "q_" << j << "_" << dist.dfa.alphabet.symbols[a] << ",";
  f << "prob,prob_float\n";
  for (const auto& entry : dist.entries) {
    for (const auto& c : entry.coords) f << c.str() << ",";
    f << entry.prob.str() << "," << fmt17(entry.prob.convert_to<double>()) << "\n";
  }
}

}  // namespace csmgeo
