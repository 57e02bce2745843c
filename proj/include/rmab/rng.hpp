#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace rmab {

/// Seeded 64-bit Mersenne Twister with distribution helpers implemented
/// here rather than through <random> distributions, whose outputs are not
/// specified bit-for-bit across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n) {
    auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  /// Draws an index from a discrete distribution given by `probs`
  /// (assumed to sum to 1 up to rounding).
  std::size_t categorical(std::span<const double> probs) {
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return i;
    }
    return probs.size() - 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rmab
