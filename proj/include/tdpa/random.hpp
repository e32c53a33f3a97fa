#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace tdpa {

// Deterministic, order-independent randomness. Every consumer derives its own
// stream from (seed, purpose tag, entity keys), so adding or reordering draws
// in one place never shifts the values drawn elsewhere. Outputs are identical
// across runs on the same machine for a fixed seed.

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Purpose tags for substream derivation.
namespace rng_stream {
inline constexpr std::uint64_t kOracleNoise = 0x01;
inline constexpr std::uint64_t kDetectorMiss = 0x02;
inline constexpr std::uint64_t kClutter = 0x03;
inline constexpr std::uint64_t kBoxJitter = 0x04;
inline constexpr std::uint64_t kEmbeddingNoise = 0x05;
inline constexpr std::uint64_t kMineVideos = 0x06;
inline constexpr std::uint64_t kMineBoxes = 0x07;
inline constexpr std::uint64_t kMineFrames = 0x08;
inline constexpr std::uint64_t kGalleryJitter = 0x09;
inline constexpr std::uint64_t kScenario = 0x0a;
}  // namespace rng_stream

/// SplitMix64 stream keyed by a seed plus an arbitrary list of subkeys.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(mix64(seed)) {}

  Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) : state_(mix64(seed)) {
    for (std::uint64_t k : keys) state_ = mix64(state_ ^ mix64(k));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Box-Muller; consumes exactly two uniforms per draw.
  double normal(double mean, double sd) {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Knuth's product method; fine for the small rates used here.
  int poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    const double limit = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

private:
  std::uint64_t state_;
};

}  // namespace tdpa
