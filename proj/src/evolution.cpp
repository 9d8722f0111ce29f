#include "csmgeo/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "csmgeo/util.hpp"

namespace csmgeo {

double GwfConfig::step_tau() const {
  if (tau > 0.0) return tau;
  if (L <= 0) throw std::invalid_argument("GwfConfig: L must be positive");
  if (!(beta > 0.0)) throw std::invalid_argument("GwfConfig: beta must be positive");
  return std::sqrt(beta / static_cast<double>(L));
}

EmpiricalMachine EmpiricalMachine::from_counts(DfaType dfa, std::vector<long> counts) {
  if (static_cast<int>(counts.size()) != dfa.n_edges())
    throw std::invalid_argument("EmpiricalMachine: count vector length mismatch");
  EmpiricalMachine em;
  em.state_counts.assign(dfa.n_states, 0);
  em.L = 0;
  for (int e = 0; e < dfa.n_edges(); e++) {
    if (counts[e] < 0) throw std::invalid_argument("EmpiricalMachine: negative count");
    em.state_counts[dfa.edge_list[e].first] += counts[e];
    em.L += counts[e];
  }
  for (long c : counts)
    if (c == 0) em.degenerate = true;
  em.counts = std::move(counts);
  em.dfa = std::move(dfa);
  return em;
}

Machine EmpiricalMachine::realize(const Machine& parent, DegeneratePolicy policy) const {
  if (!parent.dfa.same_type(dfa))
    throw std::invalid_argument("EmpiricalMachine::realize: parent type differs");
  bool unvisited = false;
  for (long s : state_counts)
    if (s == 0) unvisited = true;
  if (unvisited && policy == DegeneratePolicy::reject_resample)
    throw std::invalid_argument(
        "EmpiricalMachine::realize: unvisited state under the reject policy");
  const int E = dfa.n_edges();
  std::vector<std::string> lits(E);
  std::vector<double> qd(E);
  bool all_exact = true;
  for (int j = 0; j < dfa.n_states; j++) {
    if (state_counts[j] > 0) {
      for (int e : dfa.state_edges[j]) {
        lits[e] = std::to_string(counts[e]) + "/" + std::to_string(state_counts[j]);
        qd[e] = static_cast<double>(counts[e]) / static_cast<double>(state_counts[j]);
      }
    } else {
      for (int e : dfa.state_edges[j]) {  // inherit the parent's row
        if (!parent.q_exact.empty())
          lits[e] = parent.q_exact[e];
        else
          all_exact = false;
        qd[e] = parent.q[e];
      }
    }
  }
  if (all_exact) return Machine::make_exact(dfa, std::move(lits));
  return Machine::make(dfa, std::move(qd));
}

GwfStepResult gwf_step(const Machine& parent, const FitnessPotential& pot, const GwfConfig& cfg,
                       RngStream& rng) {
  if (cfg.N < 2) throw std::invalid_argument("gwf_step: N must be at least 2");
  if (cfg.L < 1) throw std::invalid_argument("gwf_step: L must be at least 1");
  GwfStepResult res;
  std::vector<Machine> offspring;
  offspring.reserve(cfg.N);
  for (int i = 0; i < cfg.N; i++) {
    int tries = 0;
    while (true) {
      EmpiricalMachine em =
          EmpiricalMachine::from_counts(parent.dfa, sample_edge_counts(parent, cfg.L, rng));
      bool unvisited = false;
      for (long s : em.state_counts)
        if (s == 0) unvisited = true;
      if (unvisited && cfg.policy == DegeneratePolicy::reject_resample) {
        res.retries++;
        if (++tries > cfg.max_retries)
          throw std::runtime_error("gwf_step: retry budget exhausted on degenerate offspring");
        continue;
      }
      offspring.push_back(em.realize(parent, cfg.policy));
      break;
    }
  }
  res.offspring_fitness.resize(cfg.N);
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < cfg.N; i++) {
    res.offspring_fitness[i] = pot.value(offspring[i]);
    best = std::max(best, res.offspring_fitness[i]);
  }
  std::vector<int> argmax;
  for (int i = 0; i < cfg.N; i++)
    if (res.offspring_fitness[i] == best) argmax.push_back(i);
  int pick = argmax[0];
  if (argmax.size() > 1) {
    size_t k = static_cast<size_t>(rng.uniform01() * static_cast<double>(argmax.size()));
    pick = argmax[std::min(k, argmax.size() - 1)];
  }
  res.selected = offspring[pick];
  res.fitness = best;
  return res;
}

ChainRecord run_gwf_chain(const Machine& start, const FitnessPotential& pot,
                          const GwfConfig& cfg) {
  ChainRecord rec;
  rec.dfa = start.dfa;
  rec.cfg = cfg;
  double f0 = pot.value(start);
  rec.fitness.push_back(f0);
  rec.coords.push_back(start.q);
  rec.fitness_min.push_back(f0);
  rec.fitness_max.push_back(f0);
  Machine cur = start;
  for (int g = 1; g <= cfg.generations; g++) {
    RngStream rng(derive_seed(cfg.seed, static_cast<uint64_t>(g)));
    GwfStepResult r = gwf_step(cur, pot, cfg, rng);
    cur = r.selected;
    rec.fitness.push_back(r.fitness);
    rec.coords.push_back(cur.q);
    auto [lo, hi] = std::minmax_element(r.offspring_fitness.begin(), r.offspring_fitness.end());
    rec.fitness_min.push_back(*lo);
    rec.fitness_max.push_back(*hi);
  }
  return rec;
}

static void write_coord_header(std::ofstream& f, const DfaType& dfa, const std::string& prefix) {
  for (const auto& [j, a] : dfa.edge_list) f << "," << prefix << j << "_" << dfa.alphabet.symbols[a];
}

void write_chain_csv(const ChainRecord& rec, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write chain csv: " + path);
  f << "gen,fitness,fitness_min,fitness_max";
  write_coord_header(f, rec.dfa, "q_");
  f << "\n";
  for (size_t g = 0; g < rec.fitness.size(); g++) {
    f << g << "," << fmt17(rec.fitness[g]) << "," << fmt17(rec.fitness_min[g]) << ","
      << fmt17(rec.fitness_max[g]);
    for (double x : rec.coords[g]) f << "," << fmt17(x);
    f << "\n";
  }
}

ExpectationTrajectory expectation_trajectory(const Machine& start, const FitnessPotential& pot,
                                             const GwfConfig& cfg) {
  if (cfg.mc_runs < 2)
    throw std::invalid_argument("expectation_trajectory: mc_runs must be at least 2");
  ExpectationTrajectory tr;
  tr.dfa = start.dfa;
  const int E = start.dfa.n_edges();
  const double tau = cfg.step_tau();
  tr.t.push_back(0.0);
  tr.mean.push_back(start.q);
  tr.se.push_back(std::vector<double>(E, 0.0));
  Machine cur = start;
  for (int n = 1; n <= cfg.generations; n++) {
    std::vector<double> sum(E, 0.0), sumsq(E, 0.0);
    for (int r = 0; r < cfg.mc_runs; r++) {
      RngStream rng(derive_seed(cfg.seed, static_cast<uint64_t>(n), static_cast<uint64_t>(r)));
      GwfStepResult res = gwf_step(cur, pot, cfg, rng);
      for (int e = 0; e < E; e++) {
        sum[e] += res.selected.q[e];
        sumsq[e] += res.selected.q[e] * res.selected.q[e];
      }
    }
    std::vector<double> mean(E), se(E);
    for (int e = 0; e < E; e++) {
      mean[e] = sum[e] / cfg.mc_runs;
      double var = (sumsq[e] - cfg.mc_runs * mean[e] * mean[e]) / (cfg.mc_runs - 1);
      se[e] = std::sqrt(std::max(0.0, var) / cfg.mc_runs);
    }
    for (int j = 0; j < start.dfa.n_states; j++) {  // remove rounding drift
      double s = 0.0;
      for (int e : start.dfa.state_edges[j]) s += mean[e];
      for (int e : start.dfa.state_edges[j]) mean[e] /= s;
    }
    cur = Machine::make(start.dfa, mean);
    tr.t.push_back(n * tau);
    tr.mean.push_back(std::move(mean));
    tr.se.push_back(std::move(se));
  }
  return tr;
}

void write_expectation_csv(const ExpectationTrajectory& tr, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write expectation csv: " + path);
  f << "t";
  write_coord_header(f, tr.dfa, "q_");
  write_coord_header(f, tr.dfa, "se_q_");
  f << "\n";
  for (size_t i = 0; i < tr.t.size(); i++) {
    f << fmt17(tr.t[i]);
    for (double x : tr.mean[i]) f << "," << fmt17(x);
    for (double x : tr.se[i]) f << "," << fmt17(x);
    f << "\n";
  }
}

}  // namespace csmgeo
