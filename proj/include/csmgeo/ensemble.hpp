#pragma once
// Exact small-L distribution of empirical machines: enumerate edge-count
// vectors admitting an Euler trail, count trail orderings through the
// matrix-tree theorem, and aggregate exact type probabilities per realized
// machine. Large-deviation and central-limit checks against the geometry.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <vector>

#include "csmgeo/geometry.hpp"

namespace csmgeo {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

struct EmpiricalType {
  std::vector<long> counts;  // per edge, summing to L
  long L = 0;
  bool is_cycle = false;     // every support vertex balanced
  int init_state = -1;       // forced start (cycles: lowest support state)
  int term_state = -1;
};

// All count vectors of total L whose multigraph admits an Euler trail
// (weakly connected support, in/out degrees balanced up to one source/sink
// pair). Refuses when the composition count exceeds the cap.
std::vector<EmpiricalType> enumerate_empirical_types(const DfaType& dfa, long L,
                                                     uint64_t cap = 20000000);

// Number of orderings of the L edge copies that form one connected trail,
// exact. Total over all admissible start states, or from one fixed start.
BigInt count_euler_trails(const DfaType& dfa, const EmpiricalType& x);
BigInt count_euler_trails_from(const DfaType& dfa, const EmpiricalType& x, int start_state);

// Exact distribution over realized machines (row-normalized count vectors).
// Coordinates of unvisited states are reported as the parent-free convention
// -1 (those entries never aggregate with interior machines).
struct ExactDistribution {
  DfaType dfa;
  long L = 0;
  struct Entry {
    std::vector<BigRational> coords;  // per edge; -1 marks unvisited states
    BigRational prob;
  };
  std::vector<Entry> entries;  // sorted lexicographically by coords
};

// Requires exact probability literals on q (rational mode). The probabilities
// sum to exactly 1.
ExactDistribution exact_ensemble_distribution(const Machine& q, long L);

// Brute-force oracle: enumerate all length-L edge paths (exponential in L)
// and aggregate the same machine-indexed distribution.
ExactDistribution path_enumeration_distribution(const Machine& q, long L);

// Log-domain variant for large L or non-rational machines.
struct TypeLogProb {
  EmpiricalType x;
  double log_prob;
};
std::vector<TypeLogProb> ensemble_log_distribution(const Machine& q, long L,
                                                   uint64_t cap = 20000000);

struct LdpRow {
  long L = 0;
  uint64_t support_size = 0;
  std::vector<double> nearest;  // realized machine closest to the target
  double rate = 0.0;            // -log Pr[nearest] / L
  double entropy_rate_ref = 0.0;  // h(nearest || q)
  double rel_err = 0.0;
};

struct LdpReport {
  std::vector<LdpRow> rows;
  bool monotone_decreasing = false;  // rel_err shrinks along the L grid
};

// Compare the exact log-probability decay of the realized machine nearest to
// `target` (in the metric at q) against the relative entropy rate.
LdpReport ldp_rate_check(const Machine& q, const Machine& target, const std::vector<long>& Ls);

struct CltReport {
  long L = 0;
  long n_samples = 0;
  long n_dropped = 0;          // degenerate draws (unvisited state)
  bool dropped_ok = true;      // dropped fraction stayed below 1%
  std::vector<std::vector<double>> covariance;  // in a g-orthonormal frame
  std::vector<double> mean;
  double max_cov_dev = 0.0;    // max |cov - identity| entrywise
  double max_mean_dev = 0.0;
};

// Rescale empirical machines by sqrt(L), express them in a g-orthonormal
// frame at q, and compare the sample covariance against the identity.
CltReport clt_covariance_check(const Machine& q, long L, long n_samples, uint64_t seed);

struct ExactCltMoments {
  long L = 0;
  std::vector<double> mean;                     // in the g-orthonormal frame
  std::vector<std::vector<double>> covariance;  // central, both states visited
  double max_cov_dev = 0.0;                     // max |cov - identity| entrywise
  double max_mean_dev = 0.0;
  double dropped_mass = 0.0;  // probability of single-state paths
};

// Exact moments of the same rescaled ensemble, free of sampling noise: group
// paths by their run structure on the two-state emitting sequence, where the
// edge counts are determined up to the free final symbol. Requires a
// two-state machine with one stay and one crossing edge per state. O(L^2)
// summands, O(L) memory.
ExactCltMoments exact_clt_moments(const Machine& q, long L);

void write_distribution_csv(const ExactDistribution& dist, const std::string& path);

}  // namespace csmgeo
