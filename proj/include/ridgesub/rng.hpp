#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace ridgesub {

/// Murmur3-style 64-bit finalizer. Used to spread seeds for independent
/// streams.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 33;
  z *= 0xff51afd7ed558ccdULL;
  z ^= z >> 33;
  z *= 0xc4ceb9fe1a85ec53ULL;
  z ^= z >> 33;
  return z;
}

/// Derives the seed for stream `stream` of a base seed. Replicates, rows and
/// experiment cells each get their own stream so parallel execution cannot
/// change the numbers.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed + 0x9e3779b97f4a7c15ULL * (stream + 1));
}

/// Seeded pseudo-random generator with a fixed, implementation-independent
/// algorithm (SplitMix64 core, Box-Muller normals). std::mt19937 would pin
/// the raw stream but not the distributions, which the standard leaves to the
/// library; this class pins both.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1); safe under log().
  double uniform_pos() {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
  }

  /// Standard normal via Box-Muller. Generates pairs; the second value is
  /// cached so consecutive calls stay cheap and the stream stays fixed.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// exp of a standard normal.
  double lognormal() { return std::exp(normal()); }

  /// Student t with 2 degrees of freedom: N(0,1) / sqrt(chi2_2 / 2), and
  /// chi2_2 = -2 log U.
  double student_t2() { return normal() / std::sqrt(-std::log(uniform_pos())); }

  /// Uniform integer in [0, n). Modulo bias is below 2^-53 for any n that
  /// fits a dataset and does not matter here.
  std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace ridgesub
