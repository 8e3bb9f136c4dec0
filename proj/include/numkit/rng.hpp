#pragma once
// Deterministic random number generator used everywhere in the project.
// SplitMix64 core so that streams are reproducible across platforms and
// cheap to fork into independent substreams.

#include <cstdint>
#include <cmath>

namespace numkit {

inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Derives an independent seed from a base seed and a salt.
inline uint64_t mix_seed(uint64_t base, uint64_t salt) {
  return mix64(base ^ (salt * 0x9e3779b97f4a7c15ull) ^ 0x6a09e667f3bcc909ull);
}

class Rng {
public:
  explicit Rng(uint64_t seed = 0) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  int uniform_int(int n) {
    return static_cast<int>(next_u64() % static_cast<uint64_t>(n));
  }

  // Standard normal via Box-Muller, caching the spare value.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Poisson sample via Knuth's product method, splitting large means so the
  // product stays away from underflow.
  int poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    int total = 0;
    while (lambda > 32.0) {
      double half = lambda * 0.5;
      total += poisson_small(half);
      lambda -= half;
    }
    return total + poisson_small(lambda);
  }

  // New generator with an independent stream.
  Rng fork(uint64_t salt) { return Rng(mix_seed(next_u64(), salt)); }

private:
  int poisson_small(double lambda) {
    double limit = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

  uint64_t state_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace numkit
