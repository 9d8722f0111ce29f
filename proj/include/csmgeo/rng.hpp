#pragma once
// Deterministic random streams. Every stochastic routine takes an explicit
// master seed; independent substreams are derived by mixing the master seed
// with task indices, so results do not depend on scheduling or call order.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace csmgeo {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Stream id = mix of master seed and up to two task indices.
inline uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b = 0) {
  return splitmix64(splitmix64(splitmix64(master) ^ a) ^ b);
}

struct RngStream {
  std::mt19937_64 eng;

  explicit RngStream(uint64_t seed) : eng(seed) {}

  // Uniform in [0,1) with 53 random bits; independent of distribution
  // implementations in the standard library.
  double uniform01() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double normal() {  // Box-Muller, no cached spare (keeps stream stateless)
    double u1 = uniform01(), u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Sample an index from unnormalized non-negative weights.
  int categorical(const std::vector<double>& w) {
    double total = 0.0;
    for (double x : w) total += x;
    if (!(total > 0.0)) throw std::runtime_error("categorical: weights sum to zero");
    double u = uniform01() * total;
    double acc = 0.0;
    for (size_t i = 0; i < w.size(); i++) {
      acc += w[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(w.size() - 1);
  }

  // Binomial(n, p) count. Uses the standard library sampler: deterministic for
  // a fixed toolchain, which is the reproducibility contract of this project.
  long binomial(long n, double p) {
    if (n < 0) throw std::invalid_argument("binomial: n < 0");
    if (n == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    std::binomial_distribution<long> dist(n, p);
    return dist(eng);
  }

  uint64_t next_u64() { return eng(); }
};

}  // namespace csmgeo
