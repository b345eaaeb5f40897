#pragma once

#include <cmath>
#include <cstdint>

#include "hcd/errors.hpp"

namespace hcd {

// Counter-based generator: sample i of a stream with seed s is
//
//   mix64(s + (i + 1) * 0x9E3779B97F4A7C15)
//
// where mix64 is the splitmix64 finalizer. Pure 64-bit unsigned
// arithmetic, so streams are bit-identical across platforms. The full
// recipe (including the double and normal mappings below) is written
// out in docs/formats.md; reimplementations must match it.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed) {}

  uint64_t seed() const { return seed_; }
  uint64_t counter() const { return counter_; }

  uint64_t next_u64() {
    ++counter_;
    return mix64(seed_ + counter_ * kGamma);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) {
    if (!(lo < hi)) throw_usage("uniform: need lo < hi");
    return lo + next_double() * (hi - lo);
  }

  // Standard normal via Box-Muller; always consumes exactly two samples.
  double normal() {
    double u1 = next_double();
    double u2 = next_double();
    return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * kPi * u2);
  }

  // Independent child stream; derive(k) is stable across runs.
  Rng derive(uint64_t stream) const {
    return Rng(mix64(seed_ ^ mix64(stream + kGamma)));
  }

  static uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  static constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  static constexpr double kPi = 3.141592653589793238462643383279502884;

  uint64_t seed_ = 0;
  uint64_t counter_ = 0;
};

}  // namespace hcd
