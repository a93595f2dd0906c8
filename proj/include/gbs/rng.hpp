#pragma once

#include <cmath>
#include <cstdint>

namespace gbs {

// Counter-derived pseudo-random stream (splitmix64).  Streams for independent
// units of work are derived from (seed, index...) so that results do not depend
// on scheduling or thread count: stream(seed, i) is a pure function of its
// arguments.  Distribution helpers are hand-rolled to keep byte-level
// reproducibility independent of the standard library version.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Derives an independent stream from a seed and up to three indices.
  static RngStream derive(std::uint64_t seed, std::uint64_t a = 0,
                          std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = mix(seed);
    s = mix(s ^ (a + 0x6a09e667f3bcc909ull));
    s = mix(s ^ (b + 0xbb67ae8584caa73bull));
    s = mix(s ^ (c + 0x3c6ef372fe94f82bull));
    return RngStream(s);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejection from the top keeps the draw unbiased.
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  double normal() {
    // Box-Muller; the second deviate is deliberately discarded so a draw
    // consumes a fixed number of uniforms.
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  int poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 64.0) {
      // Knuth product method.
      double limit = std::exp(-mean), prod = uniform();
      int k = 0;
      while (prod > limit) {
        prod *= uniform();
        ++k;
      }
      return k;
    }
    // Split recursively; exact because Poisson means add.
    int half = poisson(mean / 2);
    return half + poisson(mean - mean / 2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace gbs
