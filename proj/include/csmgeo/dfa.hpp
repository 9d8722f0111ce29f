#pragma once
// Deterministic transition structure of unifilar machines: a finite alphabet
// and a partial map (state, symbol) -> state in which every state can emit at
// least one symbol. Each such structure indexes one face of the parameter
// complex; the face coordinates are the per-state emission probabilities.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace csmgeo {

struct Alphabet {
  std::vector<std::string> symbols;  // fixed order, unique, non-empty tokens

  static Alphabet make(std::vector<std::string> symbols);
  static Alphabet of_size(int k);  // symbols "0", "1", ..., "k-1"

  int size() const { return static_cast<int>(symbols.size()); }
  int index_of(const std::string& s) const;  // -1 if absent
  bool operator==(const Alphabet& o) const { return symbols == o.symbols; }
};

struct DfaType {
  int n_states = 0;
  Alphabet alphabet;
  std::vector<std::vector<int>> next;  // next[j][a] = target state, -1 if undefined

  // Edge table in lexicographic (state, symbol) order.
  std::vector<std::pair<int, int>> edge_list;  // edge id -> (state, symbol)
  std::vector<std::vector<int>> edge_id;       // [state][symbol] -> edge id or -1
  std::vector<std::vector<int>> state_edges;   // [state] -> edge ids in symbol order

  static DfaType make(int n_states, Alphabet alphabet, std::vector<std::vector<int>> next);

  bool defined(int j, int a) const { return next[j][a] >= 0; }
  int target(int j, int a) const { return next[j][a]; }
  int edge_target(int e) const { return next[edge_list[e].first][edge_list[e].second]; }
  int n_edges() const { return static_cast<int>(edge_list.size()); }
  int n_symbols(int j) const { return static_cast<int>(state_edges[j].size()); }
  bool top_dimensional() const;          // every (state, symbol) pair defined
  int dim() const;                       // sum_j (n_symbols(j) - 1)
  bool same_type(const DfaType& o) const;
  std::string edge_name(int e) const;    // "j:a"

  // Digit string of 1-based targets row by row ('-' for undefined), e.g. a
  // two-state binary full map reads like "2121". Only valid for <= 9 states.
  std::string code() const;

  // Inverse of code() for top-dimensional types: every (state, symbol) defined.
  static DfaType from_code(const std::string& code, const Alphabet& alphabet);
};

bool is_strongly_connected(const DfaType& dfa);

// Exact closed-form counts for the family over n states and k symbols,
// as decimal strings (they overflow 64-bit quickly).
std::string dfa_type_count(int n_states, int n_symbols);          // ((n+1)^k - 1)^n
std::string top_dimensional_type_count(int n_states, int n_symbols);  // n^(n*k)

struct EnumerateOptions {
  bool strongly_connected_only = false;
  uint64_t cap = 10000000;  // refuse enumerations larger than this
};

// All transition structures over the given state count and alphabet. Refuses
// with the exact would-be count when it exceeds the cap.
std::vector<DfaType> enumerate_dfa_types(int n_states, const Alphabet& alphabet,
                                         const EnumerateOptions& opts = {});

}  // namespace csmgeo
