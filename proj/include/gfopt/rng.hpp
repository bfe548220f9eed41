#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>

namespace gfopt {

// Seeded random stream with cheap derived substreams. Substreams are keyed
// off the root seed rather than the evolving state, so workers can be handed
// pre-assigned independent streams before any draws happen.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed)
      : root_seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal (Box-Muller; the log argument is shifted into (0,1]).
  double normal() {
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) {
      throw std::invalid_argument("RandomStream::below: n must be positive");
    }
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t v = next_u64();
      if (v >= threshold) return v % n;
    }
  }

  std::uint64_t root_seed() const { return root_seed_; }

  /// Independent stream derived from (root seed, index); does not consume
  /// state, so the same index always yields the same substream.
  RandomStream substream(std::uint64_t index) const {
    return RandomStream(
        splitmix64(root_seed_ ^ splitmix64(0x9E3779B97F4A7C15ULL + index)));
  }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t root_seed_;
  std::mt19937_64 engine_;
};

}  // namespace gfopt
