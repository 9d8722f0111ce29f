#pragma once
// Deterministic dynamics on a face: the replicator vector field of a fitness
// potential, its closed form for the relative-entropy potential, the
// asymptotic selection field of the resample-select process (normalized
// gradient scaled by alpha(N)/sqrt(beta)), and an adaptive RK4 flow
// integrator with boundary/rest termination.

#include <functional>
#include <map>
#include <stdexcept>
#include <string>

#include "csmgeo/curve.hpp"
#include "csmgeo/potential.hpp"

namespace csmgeo {

// Thrown by fields that are undefined on their rest set (e.g. the normalized
// gradient at a critical point); the flow integrator reports "rest".
struct FieldAtRest : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// qdot^{j,a} = q^{j,a}/pi_j(q) (f_{j,a}(q) - fbar_j(q)) with f = gradient of
// the potential; identical to sharp(gradient).
TangentVector replicator_field(const Machine& m, const FitnessPotential& pot);

// Replicator field of the relative-entropy potential towards a goal:
// qdot^{j,a} = pi_j(goal)/pi_j(q) (goal^{j,a} - q^{j,a}).
TangentVector relent_replicator_field(const Machine& m, const Machine& goal);

// Expected drift direction of the resample-select process per unit time:
// alpha(N)/sqrt(beta) times the g-normalized potential gradient. Throws
// FieldAtRest when the gradient norm falls below rest_threshold.
TangentVector asymptotic_gwf_field(const Machine& m, const FitnessPotential& pot, int N,
                                   double beta, double rest_threshold = 1e-10);

// Expected maximum of N independent standard normals (N in [1, 64]),
// evaluated by adaptive quadrature; alpha(1) = 0.
double alpha_max_gauss(int N);

enum class FlowTermination { rest, boundary, time_limit, step_limit };

std::string to_string(FlowTermination t);

struct FlowOptions {
  double t_max = 10.0;
  double dt_init = 1e-3;
  double dt_max = 0.0;            // cap on the adaptive step; <= 0 means uncapped
  long max_steps = 200000;
  double local_tol = 1e-8;        // per-step RK4 step-doubling error bound
  double boundary_margin = 1e-6;  // stop when an edge coordinate falls below
  double rest_tol = 1e-8;         // stop when the field's g-norm falls below
};

struct FlowCurve {
  Curve curve;
  FlowTermination termination = FlowTermination::time_limit;
  std::string field_name;
  std::map<std::string, std::string> meta;  // written to the .meta sidecar
};

using VectorField = std::function<TangentVector(const Machine&)>;

FlowCurve integrate_flow(const Machine& start, const VectorField& field,
                         const std::string& field_name, const FlowOptions& opts = {});

// Write curve samples to <path> and the metadata sidecar to <path>.meta.
void write_flow_csv(const FlowCurve& fc, const std::string& path);

struct StabilityReport {
  bool stable = false;
  double worst_margin = 0.0;  // min over states and samples of the invasion gap
  int n_samples = 0;
  int n_skipped = 0;  // sample points that left the face (radius too large)
};

// Evolutionary-stability test of a candidate rest point: at low-discrepancy
// points q' in a g-ball around it, the candidate's rows must outscore q'
// under the fitness gradient at q' (strictly, for every state).
StabilityReport stability_check(const Machine& candidate, const FitnessPotential& pot,
                                double radius, int n_samples = 512);

}  // namespace csmgeo
