#pragma once

#include <cstdint>

#include "jumpact/normal.hpp"

namespace jumpact {

// Counter-based generator: the SplitMix64 output function applied to an
// affine counter. A draw is a pure function of (key, counter), so any number
// of independent substreams can be derived from one seed and results do not
// depend on scheduling. Replicated experiments derive one substream per
// (replicate, day, channel).
class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Derives an independent stream key from a seed and up to three ids.
  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a,
                                  std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t h = mix(seed + kGamma);
    h = mix(h ^ (a + kGamma));
    h = mix(h ^ (b + kGamma));
    h = mix(h ^ (c + kGamma));
    return h;
  }

  static Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0) {
    return Rng(derive_key(seed, a, b, c));
  }

  std::uint64_t next_u64() { return mix(key_ + kGamma * ++counter_); }

  // Uniform on the open interval (0,1).
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal by inversion; one uniform per draw keeps stream
  // consumption trivially reproducible.
  double normal() { return normal_quantile(uniform01()); }

  double exponential() { return -std::log(uniform01()); }

  // Poisson count by Knuth's product method; means here are far below the
  // point where a normal approximation would be worth the complexity.
  int poisson(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    int count = -1;
    double prod = 1.0;
    do {
      prod *= uniform01();
      ++count;
    } while (prod > limit);
    return count;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace jumpact
