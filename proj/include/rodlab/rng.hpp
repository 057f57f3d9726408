#ifndef RODLAB_RNG_HPP
#define RODLAB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "rodlab/vec2.hpp"

namespace rodlab {

/// Deterministic RNG: mt19937_64 with hand-rolled mappings so streams are
/// identical across standard libraries (distribution classes are not
/// portable).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(raw() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) {
    return raw() % n;  // bias negligible for the small n used here
  }

  Vec2 unit_vec() {
    double a = uniform(0.0, 2.0 * M_PI);
    return {std::cos(a), std::sin(a)};
  }

private:
  std::mt19937_64 eng_;
};

}  // namespace rodlab

#endif  // RODLAB_RNG_HPP
