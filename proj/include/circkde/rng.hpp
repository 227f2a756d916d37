#pragma once

#include <cstdint>
#include <random>

namespace circkde {

/// Seeded random stream. The (seed, stream) pair fully determines the draws;
/// different stream ids give independent sequences for the same seed.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream = 0);

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::uint64_t stream() const { return stream_; }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal();
  /// Uniform integer on [0, bound).
  std::uint64_t below(std::uint64_t bound);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// SplitMix64 finalizer, used to derive stream ids from structured keys.
[[nodiscard]] std::uint64_t mix64(std::uint64_t x);

/// Combines several integers into one well-mixed stream id.
[[nodiscard]] std::uint64_t derive_stream(std::initializer_list<std::uint64_t> parts);

}  // namespace circkde
