#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "daeref/linalg.hpp"

namespace daeref {

/// SplitMix64 stream: the same seed yields the same sequence on every
/// platform, so seeded experiments are reproducible bit for bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box–Muller (one sample per call, no caching).
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Mat normal(Index rows, Index cols) {
    Mat out(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) out(i, j) = normal();
    return out;
  }

  Vec normal_vec(Index size) { return normal(size, 1); }

  Vec uniform_vec(Index size, double lo, double hi) {
    Vec out(size);
    for (Index i = 0; i < size; ++i) out(i) = uniform(lo, hi);
    return out;
  }

 private:
  std::uint64_t state_;
};

}  // namespace daeref
