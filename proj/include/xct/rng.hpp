#pragma once

#include <cstdint>

namespace xct {

// Splittable deterministic PRNG (splitmix64 core).
//
// split(a, b) derives a child stream from the parent's seed and the given
// position tags only. It never reads or advances the parent's running state,
// so a trial's randomness depends on where it sits in the experiment, not on
// how many draws happened before it. Parallel and sequential schedules
// therefore see identical bits.
class Rng {
public:
  explicit Rng(uint64_t seed) : seed_(seed), state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1), 53 random bits
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool next_bool(double p) { return next_double() < p; }

  // uniform in [0, bound), bound >= 1; rejection sampling, no modulo bias
  uint64_t next_below(uint64_t bound) {
    uint64_t threshold = -bound % bound; // 2^64 mod bound
    for (;;) {
      uint64_t v = next();
      if (v >= threshold) return v % bound;
    }
  }

  // child stream at position (a, b); pure function of (seed, a, b)
  Rng split(uint64_t a, uint64_t b = 0) const {
    uint64_t h = mix(seed_ ^ 0x5851f42d4c957f2dull);
    h = mix(h ^ a);
    h = mix(h ^ b);
    return Rng(h);
  }

  uint64_t seed() const { return seed_; }

private:
  static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  uint64_t seed_;
  uint64_t state_;
};

} // namespace xct
