#include "csmgeo/predictive.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <stdexcept>

#include "csmgeo/util.hpp"

namespace csmgeo {

using boost::multiprecision::cpp_rational;

StatePartition predictive_partition(const Machine& m, double tol, uint64_t word_cap) {
  const int n = m.dfa.n_states;
  const int k = m.dfa.alphabet.size();
  const int N = 2 * n - 1;  // words of this length determine the process
  double words = std::pow(static_cast<double>(k), N);
  if (words > static_cast<double>(word_cap))
    throw std::runtime_error("predictive_partition: needs " + fmt17(words) +
                             " words of length " + std::to_string(N) + ", above the cap of " +
                             std::to_string(word_cap));

  // Max pairwise deviation of per-state word probabilities, accumulated over
  // all words up to length N by a depth-first suffix recursion:
  // u_j(a w) = q^{j,a} u_{next(j,a)}(w), u_j(empty) = 1.
  std::vector<std::vector<double>> maxdev(n, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> stack(N + 1, std::vector<double>(n, 0.0));
  stack[0].assign(n, 1.0);

  struct Frame { int depth; int symbol; };
  std::vector<Frame> todo{{0, 0}};
  while (!todo.empty()) {
    Frame f = todo.back();
    todo.pop_back();
    const std::vector<double>& u = stack[f.depth];
    std::vector<double>& v = stack[f.depth + 1];
    for (int j = 0; j < n; j++)
      v[j] = m.dfa.defined(j, f.symbol) ? m.prob(j, f.symbol) * u[m.dfa.target(j, f.symbol)] : 0.0;
    for (int j = 0; j < n; j++)
      for (int l = j + 1; l < n; l++)
        maxdev[j][l] = std::max(maxdev[j][l], std::abs(v[j] - v[l]));
    if (f.depth + 1 < N) {
      // Recurse after siblings so the stack slot for this depth stays valid:
      // push the next sibling first, then the children of the current node.
      if (f.symbol + 1 < k) todo.push_back({f.depth, f.symbol + 1});
      todo.push_back({f.depth + 1, 0});
    } else if (f.symbol + 1 < k) {
      todo.push_back({f.depth, f.symbol + 1});
    }
  }

  // Union states whose deviation stays below tol on every word.
  std::vector<int> block(n);
  for (int j = 0; j < n; j++) block[j] = j;
  for (int j = 0; j < n; j++)
    for (int l = j + 1; l < n; l++)
      if (maxdev[j][l] <= tol) {
        int bj = block[j], bl = block[l];
        for (int t = 0; t < n; t++)
          if (block[t] == bl) block[t] = bj;
      }
  return StatePartition::from_blocks(n, block);
}

// All partitions of {0..n-1} as restricted growth strings, filtered to the
// transition-compatible non-discrete ones.
std::vector<StatePartition> degeneracy_strata(const DfaType& dfa) {
  const int n = dfa.n_states;
  std::vector<StatePartition> out;
  std::vector<int> rgs(n, 0);
  while (true) {
    StatePartition p = StatePartition::from_blocks(n, rgs);
    if (!p.is_discrete()) {
      bool ok = true;
      auto blocks = p.blocks();
      for (const auto& blk : blocks) {
        for (size_t i = 1; i + 0 < blk.size() && ok; i++) {
          for (int a = 0; a < dfa.alphabet.size() && ok; a++) {
            if (dfa.defined(blk[0], a) != dfa.defined(blk[i], a)) ok = false;  // symbol sets match
            else if (dfa.defined(blk[0], a) &&
                     p.block_of[dfa.target(blk[0], a)] != p.block_of[dfa.target(blk[i], a)])
              ok = false;  // targets agree blockwise
          }
        }
      }
      if (ok) out.push_back(std::move(p));
    }
    // next restricted growth string
    int pos = n - 1;
    while (pos > 0) {
      int maxv = 0;
      for (int i = 0; i < pos; i++) maxv = std::max(maxv, rgs[i]);
      if (rgs[pos] <= maxv) break;
      pos--;
    }
    if (pos == 0) break;
    rgs[pos]++;
    for (int i = pos + 1; i < n; i++) rgs[i] = 0;
  }
  return out;
}

// Constraint rows q^{j0,a} - q^{j,a} = 0 for a stratum, as ambient covectors.
static std::vector<std::vector<int>> stratum_constraints(const DfaType& dfa,
                                                         const StatePartition& p) {
  std::vector<std::vector<int>> rows;
  for (const auto& blk : p.blocks()) {
    for (size_t i = 1; i < blk.size(); i++) {
      for (int a = 0; a < dfa.alphabet.size(); a++) {
        if (!dfa.defined(blk[0], a)) continue;
        std::vector<int> c(dfa.n_edges(), 0);
        c[dfa.edge_id[blk[0]][a]] = 1;
        c[dfa.edge_id[blk[i]][a]] = -1;
        rows.push_back(std::move(c));
      }
    }
  }
  return rows;
}

// Rank over the rationals of the constraint rows restricted to the face
// tangent space (per-state coordinates eliminated by the row-sum relation).
static int face_rank(const DfaType& dfa, const std::vector<std::vector<int>>& rows) {
  std::vector<int> keep;  // all but the last edge of each state
  for (int j = 0; j < dfa.n_states; j++)
    for (size_t i = 0; i + 1 < dfa.state_edges[j].size(); i++)
      keep.push_back(dfa.state_edges[j][i]);
  std::vector<std::vector<cpp_rational>> mat;
  for (const auto& row : rows) {
    std::vector<cpp_rational> r(keep.size());
    for (size_t c = 0; c < keep.size(); c++) {
      int e = keep[c];
      const auto& [j, a] = dfa.edge_list[e];
      int last = dfa.state_edges[j].back();
      // substitute q^{j,last} = 1 - sum of the kept coordinates of state j
      r[c] = cpp_rational(row[e]) - cpp_rational(row[last]);
    }
    mat.push_back(std::move(r));
  }
  int rank = 0;
  for (size_t col = 0; col < keep.size() && rank < static_cast<int>(mat.size()); col++) {
    size_t piv = rank;
    while (piv < mat.size() && mat[piv][col] == 0) piv++;
    if (piv == mat.size()) continue;
    std::swap(mat[rank], mat[piv]);
    for (size_t r = 0; r < mat.size(); r++) {
      if (static_cast<int>(r) == rank || mat[r][col] == 0) continue;
      cpp_rational f = mat[r][col] / mat[rank][col];
      for (size_t c = col; c < keep.size(); c++) mat[r][c] -= f * mat[rank][c];
    }
    rank++;
  }
  return rank;
}

ComponentCheck same_component(const Machine& a, const Machine& b) {
  if (!a.dfa.same_type(b.dfa))
    throw std::invalid_argument("same_component: machines have different types");
  if (!a.interior() || !b.interior())
    throw std::invalid_argument("same_component: requires interior machines");
  if (!predictive_partition(a).is_discrete() || !predictive_partition(b).is_discrete())
    throw std::invalid_argument("same_component: requires non-degenerate machines");

  const int E = a.dfa.n_edges();
  std::vector<cpp_rational> qa(E), qb(E);
  for (int e = 0; e < E; e++) {
    qa[e] = cpp_rational(a.q[e]);  // exact: doubles are dyadic rationals
    qb[e] = cpp_rational(b.q[e]);
  }

  bool thin_crossing = false;
  std::string thin_witness;
  for (const auto& sigma : degeneracy_strata(a.dfa)) {
    auto rows = stratum_constraints(a.dfa, sigma);
    // Values of each constraint at the segment endpoints.
    bool intersects = true;
    bool pinned = false;
    cpp_rational t_common = 0;
    std::vector<std::pair<cpp_rational, cpp_rational>> vals;
    for (const auto& c : rows) {
      cpp_rational va = 0, vb = 0;
      for (int e = 0; e < E; e++) {
        if (c[e] == 0) continue;
        va += c[e] * qa[e];
        vb += c[e] * qb[e];
      }
      vals.emplace_back(va, vb);
      if (va == 0 && vb == 0) continue;  // holds on the whole segment
      if (va == vb) {
        intersects = false;  // constant non-zero along the segment
        break;
      }
      cpp_rational t = va / (va - vb);
      if (t < 0 || t > 1) {
        intersects = false;
        break;
      }
      if (pinned && t != t_common) {
        intersects = false;
        break;
      }
      pinned = true;
      t_common = t;
    }
    if (!intersects) continue;

    std::string name = "stratum";
    for (const auto& blk : sigma.blocks())
      if (blk.size() > 1) {
        name += " {";
        for (size_t i = 0; i < blk.size(); i++) name += (i ? "," : "") + std::to_string(blk[i]);
        name += "}";
      }
    if (face_rank(a.dfa, rows) == 1) {
      // A codimension-1 wall slices the convex face in two; strict sign
      // change across it separates the endpoints for good.
      for (const auto& [va, vb] : vals)
        if ((va > 0 && vb < 0) || (va < 0 && vb > 0))
          return {ComponentRelation::different, "separated by codimension-1 " + name};
    }
    thin_crossing = true;
    thin_witness = "segment meets " + name + " of codimension >= 2";
  }
  if (thin_crossing) return {ComponentRelation::unknown, thin_witness};
  return {ComponentRelation::same, "straight segment avoids all strata"};
}

}  // namespace csmgeo
