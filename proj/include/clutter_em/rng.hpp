#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace clutter {

/// Seedable, splittable random stream.
///
/// Every consumer derives its own substream from (master seed, purpose tag,
/// index), so results never depend on the order in which streams are used or
/// on how trials are scheduled across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Substream identified by (master, tag, index).
  static Rng derive(std::uint64_t master, std::string_view tag, std::uint64_t index);

  /// Child substream keyed on this stream's seed; does not advance this stream.
  Rng split(std::string_view tag, std::uint64_t index) const;

  std::uint64_t seed() const noexcept { return seed_; }

  /// Standard normal N(0, 1).
  double normal();

  /// Circular complex normal CN(0, 1): real and imaginary parts each N(0, 1/2).
  std::complex<double> circular_normal();

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// SplitMix64 finalizer; exposed for seed mixing in tests and tools.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

}  // namespace clutter
