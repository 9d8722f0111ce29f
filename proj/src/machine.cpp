#include "csmgeo/machine.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "csmgeo/rational.hpp"

namespace csmgeo {

using boost::multiprecision::cpp_rational;

// Parse "p/q" or a plain decimal into an exact rational.
cpp_rational rational_from_literal(const std::string& lit) {
  auto slash = lit.find('/');
  if (slash != std::string::npos) {
    cpp_rational num(lit.substr(0, slash));
    cpp_rational den(lit.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("probability literal divides by zero: " + lit);
    return num / den;
  }
  std::string s = lit;
  bool neg = !s.empty() && s[0] == '-';
  if (neg) s = s.substr(1);
  auto dot = s.find('.');
  std::string digits = s;
  int frac_len = 0;
  if (dot != std::string::npos) {
    digits = s.substr(0, dot) + s.substr(dot + 1);
    frac_len = static_cast<int>(s.size() - dot - 1);
  }
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("bad probability literal: " + lit);
  cpp_rational r{boost::multiprecision::cpp_int(digits)};
  for (int i = 0; i < frac_len; i++) r /= 10;
  return neg ? -r : r;
}

Machine Machine::make(DfaType dfa, std::vector<double> q) {
  if (static_cast<int>(q.size()) != dfa.n_edges())
    throw std::invalid_argument("machine: probability vector length != edge count");
  Machine m;
  m.boundary = false;
  for (int j = 0; j < dfa.n_states; j++) {
    double row = 0.0;
    for (int e : dfa.state_edges[j]) {
      if (!(q[e] >= 0.0) || q[e] > 1.0)
        throw std::invalid_argument("machine: probability out of [0,1] on edge " + dfa.edge_name(e));
      if (q[e] == 0.0) m.boundary = true;
      row += q[e];
    }
    if (std::abs(row - 1.0) > kRowSumTol)
      throw std::invalid_argument("machine: state " + std::to_string(j) + " row sums to " +
                                  std::to_string(row) + ", expected 1");
  }
  m.dfa = std::move(dfa);
  m.q = std::move(q);
  return m;
}

Machine Machine::make_exact(DfaType dfa, std::vector<std::string> literals) {
  if (static_cast<int>(literals.size()) != dfa.n_edges())
    throw std::invalid_argument("machine: literal vector length != edge count");
  std::vector<double> q(literals.size());
  for (int j = 0; j < dfa.n_states; j++) {
    cpp_rational row = 0;
    for (int e : dfa.state_edges[j]) {
      cpp_rational r = rational_from_literal(literals[e]);
      if (r < 0 || r > 1)
        throw std::invalid_argument("machine: probability out of [0,1] on edge " + dfa.edge_name(e));
      row += r;
      q[e] = static_cast<double>(r);
    }
    if (row != 1)
      throw std::invalid_argument("machine: state " + std::to_string(j) +
                                  " exact row sum differs from 1");
  }
  Machine m = make(std::move(dfa), std::move(q));
  m.q_exact = std::move(literals);
  return m;
}

MixedState MixedState::make(std::vector<double> p) {
  double total = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) throw std::invalid_argument("mixed state: negative weight");
    total += x;
  }
  if (!(total > 0.0)) throw std::invalid_argument("mixed state: zero total mass");
  MixedState mu;
  mu.p = std::move(p);
  return mu;
}

double mixed_state_entropy(const MixedState& mu) {
  const size_t n = mu.p.size();
  if (n == 1) return 0.0;
  double total = 0.0;
  for (double x : mu.p) total += x;
  double h = 0.0;
  for (double x : mu.p) {
    if (x > 0.0) {
      double p = x / total;
      h -= p * std::log(p);
    }
  }
  h /= std::log(static_cast<double>(n));
  return std::min(1.0, std::max(0.0, h));
}

StatePartition StatePartition::from_blocks(int n_states, const std::vector<int>& raw) {
  if (static_cast<int>(raw.size()) != n_states)
    throw std::invalid_argument("partition: wrong length");
  // Renumber blocks in order of first appearance.
  StatePartition p;
  p.block_of.assign(n_states, -1);
  std::vector<int> remap;
  for (int j = 0; j < n_states; j++) {
    int found = -1;
    for (size_t b = 0; b < remap.size(); b++)
      if (remap[b] == raw[j]) found = static_cast<int>(b);
    if (found < 0) {
      found = static_cast<int>(remap.size());
      remap.push_back(raw[j]);
    }
    p.block_of[j] = found;
  }
  p.n_blocks = static_cast<int>(remap.size());
  return p;
}

StatePartition StatePartition::discrete(int n_states) {
  StatePartition p;
  p.block_of.resize(n_states);
  for (int j = 0; j < n_states; j++) p.block_of[j] = j;
  p.n_blocks = n_states;
  return p;
}

std::vector<std::vector<int>> StatePartition::blocks() const {
  std::vector<std::vector<int>> out(n_blocks);
  for (size_t j = 0; j < block_of.size(); j++) out[block_of[j]].push_back(static_cast<int>(j));
  return out;
}

static Eigen::MatrixXd transition_matrix(const Machine& m) {
  const int n = m.dfa.n_states;
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < m.dfa.n_edges(); e++) {
    const auto& [j, a] = m.dfa.edge_list[e];
    P(j, m.dfa.target(j, a)) += m.q[e];
  }
  return P;
}

std::vector<double> stationary_state(const Machine& m) {
  const int n = m.dfa.n_states;
  if (n == 1) return {1.0};
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) - transition_matrix(m);
  // Weight of state j = principal minor of M at (j, j); by the Markov chain
  // tree theorem this is the in-tree weight sum, positive when the support is
  // strongly connected.
  std::vector<double> minors(n);
  double total = 0.0;
  for (int j = 0; j < n; j++) {
    Eigen::MatrixXd S(n - 1, n - 1);
    for (int r = 0, rr = 0; r < n; r++) {
      if (r == j) continue;
      for (int c = 0, cc = 0; c < n; c++) {
        if (c == j) continue;
        S(rr, cc++) = M(r, c);
      }
      rr++;
    }
    minors[j] = S.determinant();
    total += minors[j];
  }
  if (!(total > 0.0))
    throw std::runtime_error("stationary_state: degenerate chain (support not strongly connected?)");
  std::vector<double> pi(n);
  for (int j = 0; j < n; j++) {
    pi[j] = minors[j] / total;
    if (!(pi[j] > 0.0))
      throw std::runtime_error("stationary_state: non-positive weight for state " +
                               std::to_string(j) + " (support not strongly connected?)");
  }
  return pi;
}

std::vector<double> stationary_state_solve(const Machine& m) {
  const int n = m.dfa.n_states;
  if (n == 1) return {1.0};
  Eigen::MatrixXd A = (transition_matrix(m) - Eigen::MatrixXd::Identity(n, n)).transpose();
  A.row(n - 1).setOnes();  // replace one redundant equation with normalization
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  Eigen::VectorXd x = A.partialPivLu().solve(b);
  return std::vector<double>(x.data(), x.data() + n);
}

double word_probability(const Machine& m, const std::vector<double>& init,
                        const std::vector<int>& word) {
  const int n = m.dfa.n_states;
  if (static_cast<int>(init.size()) != n)
    throw std::invalid_argument("word_probability: init length != state count");
  std::vector<double> nu = init, out(n);
  for (int a : word) {
    if (a < 0 || a >= m.dfa.alphabet.size())
      throw std::invalid_argument("word_probability: symbol index out of range");
    std::fill(out.begin(), out.end(), 0.0);
    for (int j = 0; j < n; j++) {
      if (nu[j] == 0.0 || !m.dfa.defined(j, a)) continue;
      out[m.dfa.target(j, a)] += nu[j] * m.prob(j, a);
    }
    std::swap(nu, out);
  }
  double total = 0.0;
  for (double x : nu) total += x;
  return total;
}

double word_probability(const Machine& m, const std::vector<int>& word) {
  return word_probability(m, stationary_state(m), word);
}

double edge_sequence_probability(const Machine& m, const std::vector<double>& init,
                                 const std::vector<int>& edges) {
  if (edges.empty()) return 1.0;
  const auto& [j0, a0] = m.dfa.edge_list.at(edges[0]);
  double p = init.at(j0);
  int state = j0;
  for (int e : edges) {
    const auto& [j, a] = m.dfa.edge_list.at(e);
    if (j != state) return 0.0;  // not a path of the transition structure
    p *= m.q[e];
    state = m.dfa.target(j, a);
  }
  return p;
}

std::vector<int> sample_edge_sequence(const Machine& m, long L, RngStream& rng) {
  if (L < 0) throw std::invalid_argument("sample_edge_sequence: negative length");
  std::vector<double> pi = stationary_state(m);
  int state = rng.categorical(pi);
  std::vector<int> out;
  out.reserve(L);
  for (long l = 0; l < L; l++) {
    const auto& es = m.dfa.state_edges[state];
    double u = rng.uniform01(), acc = 0.0;
    int chosen = es.back();
    for (int e : es) {
      acc += m.q[e];
      if (u < acc) {
        chosen = e;
        break;
      }
    }
    out.push_back(chosen);
    state = m.dfa.target(m.dfa.edge_list[chosen].first, m.dfa.edge_list[chosen].second);
  }
  return out;
}

std::vector<long> sample_edge_counts(const Machine& m, long L, RngStream& rng) {
  if (L < 0) throw std::invalid_argument("sample_edge_counts: negative length");
  std::vector<long> counts(m.dfa.n_edges(), 0);
  if (m.dfa.n_states == 1) {
    // One state: counts of an i.i.d. string are multinomial. Sample by
    // conditional binomials instead of walking the string.
    long rem = L;
    double mass = 1.0;
    for (int e = 0; e < m.dfa.n_edges(); e++) {
      if (rem == 0) break;
      if (e + 1 == m.dfa.n_edges()) {
        counts[e] = rem;
        break;
      }
      double p = mass > 0.0 ? std::min(1.0, m.q[e] / mass) : 1.0;
      counts[e] = rng.binomial(rem, p);
      rem -= counts[e];
      mass -= m.q[e];
    }
    return counts;
  }
  std::vector<double> pi = stationary_state(m);
  int state = rng.categorical(pi);
  for (long l = 0; l < L; l++) {
    const auto& es = m.dfa.state_edges[state];
    double u = rng.uniform01(), acc = 0.0;
    int chosen = es.back();
    for (int e : es) {
      acc += m.q[e];
      if (u < acc) {
        chosen = e;
        break;
      }
    }
    counts[chosen]++;
    state = m.dfa.target(m.dfa.edge_list[chosen].first, m.dfa.edge_list[chosen].second);
  }
  return counts;
}

}  // namespace csmgeo
