#pragma once

#include <cstdint>
#include <limits>

namespace sphens {

/// SplitMix64 output finalizer.
///
///   x += 0x9e3779b97f4a7c15
///   x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9
///   x = (x ^ (x >> 27)) * 0x94d049bb133111eb
///   x =  x ^ (x >> 31)
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Sampler tags fed into seed derivation.
enum class SeedTag : std::uint64_t { Matrix = 1, Dpp = 2, Iid = 3 };

/// Seed of replicate r:
///   mix64(mix64(mix64(mix64(base) ^ tag) ^ n) ^ r)
constexpr std::uint64_t mix_seed(std::uint64_t base, SeedTag tag, std::uint64_t n,
                                 std::uint64_t replicate) noexcept {
  std::uint64_t h = mix64(base);
  h = mix64(h ^ static_cast<std::uint64_t>(tag));
  h = mix64(h ^ n);
  return mix64(h ^ replicate);
}

/// SplitMix64 stream. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniform_pos() noexcept { return 1.0 - uniform(); }

  /// Standard normal (Box-Muller, second value of each pair cached).
  double normal() noexcept;
  /// Gamma(shape, 1) by Marsaglia-Tsang.
  double gamma(double shape) noexcept;
  /// Beta(a, b) as G1 / (G1 + G2).
  double beta(double a, double b) noexcept;
  /// BetaPrime(a, b) as G1 / G2.
  double beta_prime(double a, double b) noexcept;

 private:
  std::uint64_t state_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace sphens
