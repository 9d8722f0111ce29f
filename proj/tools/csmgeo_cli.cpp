// csmgeo: enumeration, flows, geodesics, gWF simulation, validation suites,
// and the baked-in figure datasets, all reproducible from a fixed seed.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csmgeo/dynamics.hpp"
#include "csmgeo/ensemble.hpp"
#include "csmgeo/figures.hpp"
#include "csmgeo/machine_io.hpp"
#include "csmgeo/runmeta.hpp"
#include "csmgeo/util.hpp"
#include "csmgeo/validate.hpp"

namespace {

using namespace csmgeo;

void ensure_dir(const std::string& dir) {
  std::filesystem::create_directories(dir);
}

int cmd_enumerate(int n_states, int alphabet_size, uint64_t cap, const std::string& list_path,
                  uint64_t seed, const std::string& out_dir) {
  RunManifest man;
  man.subcommand = "enumerate";
  man.seed = seed;
  man.add_param("states", std::to_string(n_states));
  man.add_param("alphabet", std::to_string(alphabet_size));
  man.add_param("cap", std::to_string(cap));

  EnumerateOptions opts;
  opts.cap = cap;
  std::vector<DfaType> all = enumerate_dfa_types(n_states, Alphabet::of_size(alphabet_size), opts);
  long top = 0, sc = 0;
  for (const DfaType& d : all) {
    if (d.top_dimensional()) top++;
    if (is_strongly_connected(d)) sc++;
  }
  std::printf("types %zu (closed form %s)\n", all.size(),
              dfa_type_count(n_states, alphabet_size).c_str());
  std::printf("top-dimensional %ld (closed form %s)\n", top,
              top_dimensional_type_count(n_states, alphabet_size).c_str());
  std::printf("strongly connected %ld\n", sc);

  if (!list_path.empty()) {
    std::ofstream f(list_path);
    if (!f) throw std::runtime_error("cannot write " + list_path);
    f << "code,top_dimensional,strongly_connected\n";
    for (const DfaType& d : all)
      f << d.code() << "," << (d.top_dimensional() ? 1 : 0) << ","
        << (is_strongly_connected(d) ? 1 : 0) << "\n";
    man.add_param("list", list_path);
    man.add_output(list_path);
  }
  ensure_dir(out_dir);
  man.write(out_dir);
  return 0;
}

int cmd_figure(const std::string& name, const FigureOptions& opts, const std::string& out_dir) {
  RunManifest man;
  man.subcommand = "figure";
  man.seed = opts.seed;
  man.add_param("name", name);
  man.add_param("grid", std::to_string(opts.grid));
  man.add_param("N", std::to_string(opts.N));
  man.add_param("beta", fmt17(opts.beta));

  FigureBundle b = make_figure(name, opts);
  ensure_dir(out_dir);
  write_figure_bundle(b, out_dir);
  for (const char* f : {"trajectories.csv", "geodesics.csv", "excess.csv", "trajectories.svg",
                        "geodesics.svg", "excess.svg"})
    man.add_output(out_dir + "/" + f);
  man.write(out_dir);

  std::printf("%s: %zu cells, %d flows at rest, %d geodesics converged\n", name.c_str(),
              b.cells.size(), b.n_flow_ok, b.n_geodesic_ok);
  for (const FigureCell& c : b.cells)
    if (!c.note.empty()) std::printf("  cell %d: %s\n", c.id, c.note.c_str());
  return (b.n_flow_ok == static_cast<int>(b.cells.size()) &&
          b.n_geodesic_ok == static_cast<int>(b.cells.size()))
             ? 0
             : 1;
}

int cmd_validate(const std::string& suite, const std::string& machine_path, int pairs, long L,
                 long n_samples, int mc_runs, int generations, uint64_t seed,
                 const std::string& out_dir) {
  RunManifest man;
  man.subcommand = "validate";
  man.seed = seed;
  man.add_param("suite", suite);
  if (!machine_path.empty()) {
    man.add_param("machine", machine_path);
    man.add_input(machine_path);
  }

  ValidateReport rep;
  if (suite == "geometry") {
    Machine m = machine_path.empty()
                    ? Machine::make(one_state_dfa(3), {0.2, 0.6, 0.2})
                    : read_machine_file(machine_path);
    man.add_param("pairs", std::to_string(pairs));
    rep = validate_geometry(m, pairs, seed);
  } else if (suite == "ldp") {
    LdpScenario sc = default_ldp_scenario();
    if (!machine_path.empty()) sc.q = read_machine_file(machine_path);
    rep = validate_ldp(sc);
  } else if (suite == "clt") {
    CltScenario sc = default_clt_scenario();
    if (!machine_path.empty()) sc.q = read_machine_file(machine_path);
    if (L > 0) sc.L = L;
    if (n_samples > 0) sc.n_samples = n_samples;
    sc.seed = seed;
    man.add_param("L", std::to_string(sc.L));
    man.add_param("n_samples", std::to_string(sc.n_samples));
    rep = validate_clt(sc);
  } else if (suite == "trajectory") {
    TrajectoryScenario sc = default_trajectory_scenario();
    if (!machine_path.empty()) sc.start = read_machine_file(machine_path);
    if (L > 0) sc.L = L;
    if (mc_runs > 0) sc.mc_runs = mc_runs;
    if (generations > 0) sc.generations = generations;
    sc.seed = seed;
    man.add_param("L", std::to_string(sc.L));
    man.add_param("mc_runs", std::to_string(sc.mc_runs));
    man.add_param("generations", std::to_string(sc.generations));
    rep = validate_trajectory(sc);
  } else {
    throw CLI::ValidationError("suite must be one of geometry|ldp|clt|trajectory");
  }

  ensure_dir(out_dir);
  std::string table_path = out_dir + "/validate_" + suite + ".csv";
  write_report_csv(rep, table_path);
  man.add_output(table_path);
  man.write(out_dir);
  std::fputs(report_text(rep).c_str(), stdout);
  return rep.pass ? 0 : 1;
}

int cmd_flow(const std::string& machine_path, const std::string& goal_path, int N, double beta,
             double t_max, const std::string& out_dir) {
  Machine start = read_machine_file(machine_path);
  Machine goal = read_machine_file(goal_path);
  FitnessPotential pot = relent_goal_potential(goal);
  double beta_eff = beta > 0 ? beta : alpha_max_gauss(N) * alpha_max_gauss(N);
  // Rest cutoff at gradient norm 1e-4: for this potential the norm matches
  // the g-distance to the goal to first order, and beyond that ball the
  // flipping field direction only makes the integrator grind.
  VectorField field = [&pot, N, beta_eff](const Machine& m) {
    return asymptotic_gwf_field(m, pot, N, beta_eff, 1e-4);
  };
  FlowOptions opts;
  opts.t_max = t_max;
  FlowCurve fc = integrate_flow(start, field, "asymptotic_gwf[" + pot.name + "]", opts);

  ensure_dir(out_dir);
  write_flow_csv(fc, out_dir + "/flow.csv");
  RunManifest man;
  man.subcommand = "flow";
  man.add_param("machine", machine_path);
  man.add_param("goal", goal_path);
  man.add_param("N", std::to_string(N));
  man.add_param("beta", fmt17(beta_eff));
  man.add_param("t_max", fmt17(t_max));
  man.add_input(machine_path);
  man.add_input(goal_path);
  man.add_output(out_dir + "/flow.csv");
  man.add_output(out_dir + "/flow.csv.meta");
  man.write(out_dir);
  std::printf("flow: %s after t = %s, %d samples\n", to_string(fc.termination).c_str(),
              fc.meta.at("t_end").c_str(), fc.curve.size());
  return 0;
}

int cmd_geodesic(const std::string& machine_path, const std::string& goal_path,
                 const std::string& out_dir) {
  Machine from = read_machine_file(machine_path);
  Machine to = read_machine_file(goal_path);
  GeodesicResult res = geodesic_bvp(from, to);
  ensure_dir(out_dir);
  write_curve_csv(res.curve, out_dir + "/geodesic.csv");
  RunManifest man;
  man.subcommand = "geodesic";
  man.add_param("machine", machine_path);
  man.add_param("goal", goal_path);
  man.add_input(machine_path);
  man.add_input(goal_path);
  man.add_output(out_dir + "/geodesic.csv");
  man.write(out_dir);
  std::printf("geodesic: %s, energy %s, residual %s, %d starts\n",
              res.converged ? "converged" : "FAILED", fmt17(res.energy).c_str(),
              fmt17(res.residual).c_str(), res.starts_tried);
  if (!res.converged) std::printf("  %s\n", res.message.c_str());
  return res.converged ? 0 : 1;
}

int cmd_simulate(const std::string& machine_path, const std::string& goal_path,
                 const GwfConfig& cfg, const std::string& out_dir) {
  Machine start = read_machine_file(machine_path);
  Machine goal = read_machine_file(goal_path);
  FitnessPotential pot = relent_goal_potential(goal);

  ensure_dir(out_dir);
  RunManifest man;
  man.subcommand = "simulate";
  man.seed = cfg.seed;
  man.add_param("machine", machine_path);
  man.add_param("goal", goal_path);
  man.add_param("L", std::to_string(cfg.L));
  man.add_param("N", std::to_string(cfg.N));
  man.add_param("generations", std::to_string(cfg.generations));
  man.add_param("beta", fmt17(cfg.beta));
  man.add_param("mc_runs", std::to_string(cfg.mc_runs));
  man.add_input(machine_path);
  man.add_input(goal_path);

  ChainRecord rec = run_gwf_chain(start, pot, cfg);
  write_chain_csv(rec, out_dir + "/chain.csv");
  man.add_output(out_dir + "/chain.csv");
  std::printf("chain: %d generations, final fitness %s\n", cfg.generations,
              fmt17(rec.fitness.back()).c_str());

  if (cfg.mc_runs > 0) {
    ExpectationTrajectory tr = expectation_trajectory(start, pot, cfg);
    write_expectation_csv(tr, out_dir + "/expectation.csv");
    man.add_output(out_dir + "/expectation.csv");
    std::printf("expectation trajectory: %zu steps of tau = %s\n", tr.t.size() - 1,
                fmt17(cfg.step_tau()).c_str());
  }
  man.write(out_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kToolVersion) +
               " - information geometry of finite causal-state machines"};
  app.require_subcommand(1);

  // Shared option storage; each subcommand binds the subset it uses.
  std::string machine_path, goal_path, out_dir = ".", list_path, figure_name, suite;
  int n_states = 2, alphabet_size = 2, grid = 3, N = 2, pairs = 50, generations = 0,
      mc_runs = 0;
  long L = 0, n_samples = 0;
  double beta = 0.0, t_max = 40.0;
  uint64_t seed = kDefaultSeed, cap = 10000000;

  CLI::App* enumerate = app.add_subcommand("enumerate", "count and list DFA-types");
  enumerate->add_option("--states", n_states, "number of states")->capture_default_str();
  enumerate->add_option("--alphabet", alphabet_size, "alphabet size")->capture_default_str();
  enumerate->add_option("--cap", cap, "refuse enumerations larger than this")
      ->capture_default_str();
  enumerate->add_option("--list", list_path, "write the full type listing to this CSV");
  enumerate->add_option("--seed", seed, "")->capture_default_str();
  enumerate->add_option("--out", out_dir, "manifest directory")->capture_default_str();

  CLI::App* figure = app.add_subcommand("figure", "generate a figure dataset bundle");
  figure->add_option("name", figure_name, "fig2, fig4:<code>, or fig5")->required();
  figure->add_option("--grid", grid, "grid resolution per axis")->capture_default_str();
  figure->add_option("--N", N, "offspring per generation")->capture_default_str();
  figure->add_option("--beta", beta, "selection inverse temperature; 0 = alpha(N)^2");
  figure->add_option("--seed", seed, "manifest seed")->capture_default_str();
  figure->add_option("--out", out_dir, "output directory")->required();

  CLI::App* validate = app.add_subcommand("validate", "run a validation suite");
  validate->add_option("suite", suite, "geometry, ldp, clt, or trajectory")->required();
  validate->add_option("--machine", machine_path, "machine file overriding the scenario");
  validate->add_option("--pairs", pairs, "geometry: random (q, v) pairs")
      ->capture_default_str();
  validate->add_option("--L", L, "override the scenario resample length");
  validate->add_option("--n-samples", n_samples, "clt: sample count override");
  validate->add_option("--mc-runs", mc_runs, "trajectory: Monte Carlo runs override");
  validate->add_option("--generations", generations, "trajectory: step count override");
  validate->add_option("--seed", seed, "")->capture_default_str();
  validate->add_option("--out", out_dir, "table directory")->capture_default_str();

  CLI::App* flow = app.add_subcommand("flow", "integrate the asymptotic selection flow");
  flow->add_option("--machine", machine_path, "start machine file")->required();
  flow->add_option("--goal", goal_path, "goal machine file (relative-entropy potential)")
      ->required();
  flow->add_option("--N", N, "offspring per generation")->capture_default_str();
  flow->add_option("--beta", beta, "selection inverse temperature; 0 = alpha(N)^2");
  flow->add_option("--t-max", t_max, "integration horizon")->capture_default_str();
  flow->add_option("--out", out_dir, "output directory")->required();

  CLI::App* geodesic = app.add_subcommand("geodesic", "solve the two-point geodesic problem");
  geodesic->add_option("--machine", machine_path, "start machine file")->required();
  geodesic->add_option("--goal", goal_path, "end machine file")->required();
  geodesic->add_option("--out", out_dir, "output directory")->required();

  CLI::App* simulate = app.add_subcommand("simulate", "run the resample-select chain");
  simulate->add_option("--machine", machine_path, "start machine file")->required();
  simulate->add_option("--goal", goal_path, "goal machine file (relative-entropy potential)")
      ->required();
  simulate->add_option("--L", L, "resampled string length")->capture_default_str();
  simulate->add_option("--N", N, "offspring per generation")->capture_default_str();
  simulate->add_option("--generations", generations, "chain length");
  simulate->add_option("--beta", beta, "step scale: tau = sqrt(beta/L)");
  simulate->add_option("--mc-runs", mc_runs,
                       "also write the expectation trajectory over this many runs");
  simulate->add_option("--seed", seed, "")->capture_default_str();
  simulate->add_option("--out", out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (enumerate->parsed())
      return cmd_enumerate(n_states, alphabet_size, cap, list_path, seed, out_dir);
    if (figure->parsed()) {
      FigureOptions opts;
      opts.grid = grid;
      opts.N = N;
      opts.beta = beta;
      opts.seed = seed;
      return cmd_figure(figure_name, opts, out_dir);
    }
    if (validate->parsed())
      return cmd_validate(suite, machine_path, pairs, L, n_samples, mc_runs, generations, seed,
                          out_dir);
    if (flow->parsed()) return cmd_flow(machine_path, goal_path, N, beta, t_max, out_dir);
    if (geodesic->parsed()) return cmd_geodesic(machine_path, goal_path, out_dir);
    if (simulate->parsed()) {
      GwfConfig cfg;
      if (L > 0) cfg.L = L;
      cfg.N = N;
      if (generations > 0) cfg.generations = generations;
      if (beta > 0) cfg.beta = beta;
      cfg.mc_runs = mc_runs;  // 0 = chain only
      cfg.seed = seed;
      return cmd_simulate(machine_path, goal_path, cfg, out_dir);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
