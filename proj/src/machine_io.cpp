#include "csmgeo/machine_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "csmgeo/util.hpp"

namespace csmgeo {

static std::runtime_error parse_error(const std::string& origin, int line, const std::string& msg) {
  return std::runtime_error(origin + ":" + std::to_string(line) + ": " + msg);
}

static int parse_state(const std::string& tok, int n_states, const std::string& origin, int line) {
  size_t pos = 0;
  int v;
  try {
    v = std::stoi(tok, &pos);
  } catch (...) {
    throw parse_error(origin, line, "expected a state index, got '" + tok + "'");
  }
  if (pos != tok.size() || v < 0 || v >= n_states)
    throw parse_error(origin, line, "state index '" + tok + "' out of range");
  return v;
}

Machine parse_machine_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;

  int n_states = -1;
  Alphabet alphabet;
  bool have_alphabet = false;
  struct GammaEntry { int j, a, k, line; };
  struct ProbEntry { int j, a, line; std::string literal; };
  std::vector<GammaEntry> gammas;
  std::vector<ProbEntry> probs;

  while (std::getline(in, raw)) {
    lineno++;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    auto toks = split_ws(raw);
    if (toks.empty()) continue;
    const std::string& key = toks[0];
    if (key == "states") {
      if (n_states != -1) throw parse_error(origin, lineno, "duplicate 'states' line");
      if (toks.size() != 2) throw parse_error(origin, lineno, "usage: states <n>");
      try {
        n_states = std::stoi(toks[1]);
      } catch (...) {
        throw parse_error(origin, lineno, "bad state count '" + toks[1] + "'");
      }
      if (n_states < 1) throw parse_error(origin, lineno, "state count must be >= 1");
    } else if (key == "alphabet") {
      if (have_alphabet) throw parse_error(origin, lineno, "duplicate 'alphabet' line");
      if (toks.size() < 2) throw parse_error(origin, lineno, "usage: alphabet <sym>...");
      alphabet = Alphabet::make({toks.begin() + 1, toks.end()});
      have_alphabet = true;
    } else if (key == "gamma") {
      if (n_states < 0 || !have_alphabet)
        throw parse_error(origin, lineno, "'gamma' before 'states'/'alphabet'");
      if (toks.size() != 5 || toks[3] != "->")
        throw parse_error(origin, lineno, "usage: gamma <j> <sym> -> <k>");
      int j = parse_state(toks[1], n_states, origin, lineno);
      int a = alphabet.index_of(toks[2]);
      if (a < 0) throw parse_error(origin, lineno, "unknown symbol '" + toks[2] + "'");
      int k = parse_state(toks[4], n_states, origin, lineno);
      gammas.push_back({j, a, k, lineno});
    } else if (key == "probs") {
      if (n_states < 0 || !have_alphabet)
        throw parse_error(origin, lineno, "'probs' before 'states'/'alphabet'");
      if (toks.size() != 5 || toks[3] != "=")
        throw parse_error(origin, lineno, "usage: probs <j> <sym> = <p>");
      int j = parse_state(toks[1], n_states, origin, lineno);
      int a = alphabet.index_of(toks[2]);
      if (a < 0) throw parse_error(origin, lineno, "unknown symbol '" + toks[2] + "'");
      probs.push_back({j, a, lineno, toks[4]});
    } else {
      throw parse_error(origin, lineno, "unknown key '" + key + "'");
    }
  }
  if (n_states < 0) throw std::runtime_error(origin + ": missing 'states' line");
  if (!have_alphabet) throw std::runtime_error(origin + ": missing 'alphabet' line");
  if (gammas.empty()) throw std::runtime_error(origin + ": no 'gamma' entries");

  std::vector<std::vector<int>> next(n_states, std::vector<int>(alphabet.size(), -1));
  for (const auto& g : gammas) {
    if (next[g.j][g.a] != -1)
      throw parse_error(origin, g.line, "duplicate gamma entry for state " + std::to_string(g.j) +
                                            " symbol " + alphabet.symbols[g.a]);
    next[g.j][g.a] = g.k;
  }
  DfaType dfa = DfaType::make(n_states, alphabet, std::move(next));

  std::vector<std::string> literals(dfa.n_edges());
  std::vector<char> seen(dfa.n_edges(), 0);
  for (const auto& p : probs) {
    int e = dfa.edge_id[p.j][p.a];
    if (e < 0)
      throw parse_error(origin, p.line, "probs entry for undefined transition " +
                                            std::to_string(p.j) + " " + alphabet.symbols[p.a]);
    if (seen[e]) throw parse_error(origin, p.line, "duplicate probs entry");
    seen[e] = 1;
    literals[e] = p.literal;
  }
  for (int e = 0; e < dfa.n_edges(); e++)
    if (!seen[e])
      throw std::runtime_error(origin + ": missing probs entry for transition " + dfa.edge_name(e));

  // Validate row sums at file tolerance before the stricter constructor runs.
  std::vector<double> q(dfa.n_edges());
  for (int e = 0; e < dfa.n_edges(); e++) {
    const std::string& lit = literals[e];
    double v;
    auto slash = lit.find('/');
    try {
      if (slash != std::string::npos)
        v = std::stod(lit.substr(0, slash)) / std::stod(lit.substr(slash + 1));
      else
        v = std::stod(lit);
    } catch (...) {
      throw std::runtime_error(origin + ": bad probability literal '" + lit + "'");
    }
    q[e] = v;
  }
  for (int j = 0; j < dfa.n_states; j++) {
    double row = 0.0;
    for (int e : dfa.state_edges[j]) row += q[e];
    if (std::abs(row - 1.0) > kFileRowSumTol)
      throw std::runtime_error(origin + ": state " + std::to_string(j) + " probabilities sum to " +
                               fmt17(row) + ", expected 1 within 1e-9");
  }
  try {
    return Machine::make_exact(dfa, std::move(literals));
  } catch (const std::invalid_argument&) {
    // Literals that pass the 1e-9 file tolerance but are not exactly
    // normalized: keep the machine, drop the exact view.
    return Machine::make(dfa, std::move(q));
  }
}

Machine read_machine_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open machine file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_machine_text(ss.str(), path);
}

std::string machine_to_text(const Machine& m) {
  std::ostringstream out;
  out << "states " << m.dfa.n_states << "\n";
  out << "alphabet";
  for (const auto& s : m.dfa.alphabet.symbols) out << " " << s;
  out << "\n";
  for (const auto& [j, a] : m.dfa.edge_list)
    out << "gamma " << j << " " << m.dfa.alphabet.symbols[a] << " -> " << m.dfa.target(j, a)
        << "\n";
  for (int e = 0; e < m.dfa.n_edges(); e++) {
    const auto& [j, a] = m.dfa.edge_list[e];
    out << "probs " << j << " " << m.dfa.alphabet.symbols[a] << " = "
        << (m.q_exact.empty() ? fmt17(m.q[e]) : m.q_exact[e]) << "\n";
  }
  return out.str();
}

void write_machine_file(const Machine& m, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write machine file: " + path);
  f << machine_to_text(m);
}

}  // namespace csmgeo
