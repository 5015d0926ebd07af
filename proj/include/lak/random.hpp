#pragma once

#include <cstddef>
#include <cstdint>

namespace lak {

/// SplitMix64 (Steele, Lea & Flood 2014). Chosen because its output is fully
/// specified by the seed, so corpora are reproducible across platforms and
/// languages. Independent streams are derived in counter mode with `stream`.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  /// Generator for stream `index` under `seed`; streams do not depend on each other.
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next();

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform();

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t state_;
};

}  // namespace lak
