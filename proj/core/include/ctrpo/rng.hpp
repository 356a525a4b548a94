#pragma once

#include <cmath>
#include <cstdint>

namespace ctrpo {

/// Deterministic PRNG with an explicit algorithm (splitmix64) so that runs
/// reproduce bit-exactly across standard libraries and platforms.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  /// Derive an independent stream from (seed, a, b), e.g. per (iteration, episode).
  static Rng stream(uint64_t seed, uint64_t a, uint64_t b) {
    Rng r(seed);
    r.state_ ^= mix(a + 0x9e3779b97f4a7c15ull);
    r.state_ ^= mix(b + 0xbf58476d1ce4e5b9ull);
    r.next();
    return r;
  }

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    return mix(z);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (one value per call, cached pair).
  double gaussian() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

 private:
  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  uint64_t state_;
  double cached_{0.0};
  bool has_cached_{false};
};

}  // namespace ctrpo
