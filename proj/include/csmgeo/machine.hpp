#pragma once
// A machine is a transition structure plus per-edge emission probabilities
// with unit row sums. Machines are value types: construct through the
// factories, never mutate in place.

#include <string>
#include <vector>

#include "csmgeo/dfa.hpp"
#include "csmgeo/rng.hpp"

namespace csmgeo {

struct Machine {
  DfaType dfa;
  std::vector<double> q;  // per edge id; each state's edges sum to 1 (1e-12)

  // Optional exact per-edge probability literals ("3/10" or "0.3"), carried
  // through from files or exact constructions; empty when unavailable.
  std::vector<std::string> q_exact;

  bool boundary = false;  // true iff some edge probability is exactly 0

  static Machine make(DfaType dfa, std::vector<double> q);
  static Machine make_exact(DfaType dfa, std::vector<std::string> literals);

  double prob(int j, int a) const { return q[dfa.edge_id[j][a]]; }
  double prob_edge(int e) const { return q[e]; }
  bool interior() const { return !boundary; }
};

// Row sums must match 1 within this tolerance at construction.
inline constexpr double kRowSumTol = 1e-12;

// A weighting of machine states (non-negative, positive total mass).
struct MixedState {
  std::vector<double> p;
  static MixedState make(std::vector<double> p);
};

// Normalized state uncertainty: -sum_j p_j log_{|states|} p_j in [0, 1].
// Single-state machines carry no state uncertainty, so the value is 0.
double mixed_state_entropy(const MixedState& mu);

struct StatePartition {
  std::vector<int> block_of;  // state -> block id, blocks numbered by first member
  int n_blocks = 0;

  static StatePartition from_blocks(int n_states, const std::vector<int>& block_of);
  static StatePartition discrete(int n_states);
  bool is_discrete() const { return n_blocks == static_cast<int>(block_of.size()); }
  std::vector<std::vector<int>> blocks() const;
  bool operator==(const StatePartition& o) const {
    return block_of == o.block_of && n_blocks == o.n_blocks;
  }
};

// Stationary state distribution of the internal Markov chain, computed from
// principal minors of (I - transition matrix). Requires strong connectivity
// of the support graph.
std::vector<double> stationary_state(const Machine& m);

// Same quantity through a direct linear solve of the fixed-point system;
// kept as an independent cross-check of the principal-minor route.
std::vector<double> stationary_state_solve(const Machine& m);

// Probability of emitting the word (symbol indices) from the given initial
// state weighting, summed over internal paths.
double word_probability(const Machine& m, const std::vector<double>& init,
                        const std::vector<int>& word);
double word_probability(const Machine& m, const std::vector<int>& word);  // stationary init

// Probability of one internal edge path (edge ids); zero if the sequence is
// not a valid path of the transition structure.
double edge_sequence_probability(const Machine& m, const std::vector<double>& init,
                                 const std::vector<int>& edges);

// Sample an edge path of length L, initial state drawn from the stationary
// distribution. Deterministic for a fixed stream state.
std::vector<int> sample_edge_sequence(const Machine& m, long L, RngStream& rng);

// Per-edge visit counts of such a path, without materializing it. For
// single-state machines this takes a multinomial shortcut; the resulting count
// distribution is identical to counting sample_edge_sequence output.
std::vector<long> sample_edge_counts(const Machine& m, long L, RngStream& rng);

}  // namespace csmgeo
