#pragma once

// Deterministic splittable RNG.  Every stochastic routine takes an explicit
// seed and derives independent streams with derive(), so identical
// (config, seed) pairs reproduce byte-identical reports regardless of
// evaluation order or trial parallelism.

#include <cstdint>
#include <random>

#include "gaugekit/rational.hpp"

namespace gaugekit {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : mix_(splitmix64(seed)), engine_(mix_) {}

  // Independent child stream; depends only on the construction seed and the
  // label, never on how many draws happened in between.
  Rng derive(std::uint64_t label) const { return Rng(mix_ ^ splitmix64(~label)); }

  std::uint64_t bits() { return engine_(); }

  long uniform_int(long lo, long hi) {  // inclusive bounds
    return std::uniform_int_distribution<long>(lo, hi)(engine_);
  }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  // Uniform dyadic rational in [lo, hi) on the 2^-level grid.
  Rat uniform_dyadic(const Rat& lo, const Rat& hi, int level) {
    Rat step = rat_pow2(-level);
    long n = rat_floor((hi - lo) / step);
    if (n <= 0) return lo;
    return lo + step * uniform_int(0, n - 1);
  }

  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }

 private:
  std::uint64_t mix_;
  std::mt19937_64 engine_;
};

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng(seed).derive(stream);
}

}  // namespace gaugekit
