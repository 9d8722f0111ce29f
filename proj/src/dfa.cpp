#include "csmgeo/dfa.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <set>
#include <stdexcept>

namespace csmgeo {

using boost::multiprecision::cpp_int;

Alphabet Alphabet::make(std::vector<std::string> symbols) {
  if (symbols.empty()) throw std::invalid_argument("alphabet: must be non-empty");
  std::set<std::string> seen;
  for (const auto& s : symbols) {
    if (s.empty()) throw std::invalid_argument("alphabet: empty symbol token");
    if (!seen.insert(s).second) throw std::invalid_argument("alphabet: duplicate symbol '" + s + "'");
  }
  Alphabet a;
  a.symbols = std::move(symbols);
  return a;
}

Alphabet Alphabet::of_size(int k) {
  if (k < 1) throw std::invalid_argument("alphabet: size must be >= 1");
  std::vector<std::string> syms;
  for (int i = 0; i < k; i++) syms.push_back(std::to_string(i));
  return make(std::move(syms));
}

int Alphabet::index_of(const std::string& s) const {
  for (size_t i = 0; i < symbols.size(); i++)
    if (symbols[i] == s) return static_cast<int>(i);
  return -1;
}

DfaType DfaType::make(int n_states, Alphabet alphabet, std::vector<std::vector<int>> next) {
  if (n_states < 1) throw std::invalid_argument("dfa: need at least one state");
  if (static_cast<int>(next.size()) != n_states)
    throw std::invalid_argument("dfa: transition table has wrong state count");
  const int k = alphabet.size();
  DfaType d;
  d.n_states = n_states;
  d.alphabet = std::move(alphabet);
  d.next = std::move(next);
  d.edge_id.assign(n_states, std::vector<int>(k, -1));
  d.state_edges.assign(n_states, {});
  for (int j = 0; j < n_states; j++) {
    if (static_cast<int>(d.next[j].size()) != k)
      throw std::invalid_argument("dfa: transition row has wrong symbol count");
    int defined = 0;
    for (int a = 0; a < k; a++) {
      int t = d.next[j][a];
      if (t < -1 || t >= n_states)
        throw std::invalid_argument("dfa: transition target out of range");
      if (t >= 0) {
        d.edge_id[j][a] = static_cast<int>(d.edge_list.size());
        d.state_edges[j].push_back(static_cast<int>(d.edge_list.size()));
        d.edge_list.emplace_back(j, a);
        defined++;
      }
    }
    if (defined == 0)
      throw std::invalid_argument("dfa: state " + std::to_string(j) + " emits no symbol");
  }
  return d;
}

bool DfaType::top_dimensional() const {
  return n_edges() == n_states * alphabet.size();
}

int DfaType::dim() const {
  int d = 0;
  for (int j = 0; j < n_states; j++) d += n_symbols(j) - 1;
  return d;
}

bool DfaType::same_type(const DfaType& o) const {
  return n_states == o.n_states && alphabet == o.alphabet && next == o.next;
}

std::string DfaType::edge_name(int e) const {
  const auto& [j, a] = edge_list[e];
  return std::to_string(j) + ":" + alphabet.symbols[a];
}

std::string DfaType::code() const {
  if (n_states > 9) throw std::invalid_argument("dfa code: only defined for <= 9 states");
  std::string s;
  for (int j = 0; j < n_states; j++)
    for (int a = 0; a < alphabet.size(); a++)
      s += defined(j, a) ? static_cast<char>('1' + next[j][a]) : '-';
  return s;
}

DfaType DfaType::from_code(const std::string& code, const Alphabet& alphabet) {
  const int k = alphabet.size();
  if (code.empty() || code.size() % k != 0)
    throw std::invalid_argument("dfa code: length must be a multiple of the alphabet size");
  const int n = static_cast<int>(code.size()) / k;
  std::vector<std::vector<int>> next(n, std::vector<int>(k, -1));
  for (int j = 0; j < n; j++)
    for (int a = 0; a < k; a++) {
      char c = code[j * k + a];
      if (c == '-') continue;
      if (c < '1' || c > '0' + n)
        throw std::invalid_argument("dfa code: bad digit '" + std::string(1, c) + "'");
      next[j][a] = c - '1';
    }
  return make(n, alphabet, std::move(next));
}

bool is_strongly_connected(const DfaType& dfa) {
  const int n = dfa.n_states;
  std::vector<std::vector<int>> fwd(n), bwd(n);
  for (const auto& [j, a] : dfa.edge_list) {
    int t = dfa.target(j, a);
    fwd[j].push_back(t);
    bwd[t].push_back(j);
  }
  auto reaches_all = [n](const std::vector<std::vector<int>>& adj) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack = {0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : adj[v])
        if (!seen[w]) {
          seen[w] = 1;
          count++;
          stack.push_back(w);
        }
    }
    return count == n;
  };
  return reaches_all(fwd) && reaches_all(bwd);
}

static cpp_int ipow(cpp_int base, int e) {
  cpp_int r = 1;
  for (int i = 0; i < e; i++) r *= base;
  return r;
}

std::string dfa_type_count(int n_states, int n_symbols) {
  cpp_int per_state = ipow(cpp_int(n_states + 1), n_symbols) - 1;
  return ipow(per_state, n_states).str();
}

std::string top_dimensional_type_count(int n_states, int n_symbols) {
  return ipow(cpp_int(n_states), n_states * n_symbols).str();
}

std::vector<DfaType> enumerate_dfa_types(int n_states, const Alphabet& alphabet,
                                         const EnumerateOptions& opts) {
  const int k = alphabet.size();
  cpp_int total = ipow(ipow(cpp_int(n_states + 1), k) - 1, n_states);
  if (total > cpp_int(opts.cap))
    throw std::runtime_error("enumerate_dfa_types: would enumerate " + total.str() +
                             " types, above the cap of " + std::to_string(opts.cap) +
                             "; raise the cap to proceed");

  // Each state row is encoded as k digits in base (n+1): 0 = undefined,
  // d = target d-1 otherwise. Rows skip the all-undefined encoding.
  std::vector<std::vector<int>> rows;  // all admissible rows
  {
    std::vector<int> digits(k, 0);
    while (true) {
      bool any = false;
      for (int a = 0; a < k; a++) any = any || digits[a] > 0;
      if (any) {
        std::vector<int> row(k);
        for (int a = 0; a < k; a++) row[a] = digits[a] - 1;
        rows.push_back(std::move(row));
      }
      int pos = k - 1;
      while (pos >= 0 && digits[pos] == n_states) digits[pos--] = 0;
      if (pos < 0) break;
      digits[pos]++;
    }
  }

  std::vector<DfaType> out;
  std::vector<size_t> pick(n_states, 0);
  while (true) {
    std::vector<std::vector<int>> next(n_states);
    for (int j = 0; j < n_states; j++) next[j] = rows[pick[j]];
    DfaType d = DfaType::make(n_states, alphabet, std::move(next));
    if (!opts.strongly_connected_only || is_strongly_connected(d)) out.push_back(std::move(d));
    int pos = n_states - 1;
    while (pos >= 0 && pick[pos] + 1 == rows.size()) pick[pos--] = 0;
    if (pos < 0) break;
    pick[pos]++;
  }
  return out;
}

}  // namespace csmgeo
