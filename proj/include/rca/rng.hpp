#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include "rca/types.hpp"

namespace rca {

// Counter-based splittable PRNG built on the splitmix64 finalizer: the n-th
// draw is a pure function of (stream key, n), and fold_in(i) derives an
// independent stream key.  This is the seeding contract the experiment
// harness relies on: master seed -> per-seed stream -> per-restart stream,
// reproducible bit-for-bit regardless of evaluation order or thread count.
class Prng {
 public:
  explicit Prng(std::uint64_t seed) : key_(mix(seed ^ 0x6C62272E07BB0142ull)) {}

  // Independent substream addressed by index.
  Prng fold_in(std::uint64_t index) const {
    return Prng(mix(key_ ^ mix(index + 0x9E3779B97F4A7C15ull)), Raw{});
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9E3779B97F4A7C15ull); }

  // uniform on [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Two independent standard normals (Box-Muller).
  std::pair<double, double> normal_pair() {
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return {r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2)};
  }

  // Circularly symmetric complex normal with E|z|^2 = variance.
  Complex complex_normal(double variance) {
    const auto [a, b] = normal_pair();
    const double s = std::sqrt(0.5 * variance);
    return Complex(s * a, s * b);
  }

 private:
  struct Raw {};
  Prng(std::uint64_t key, Raw) : key_(key) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace rca
