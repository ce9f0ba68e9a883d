#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace qsound {

/// Seedable generator with a sequence that is identical on every platform.
///
/// std::mt19937_64 is fully specified by the standard; the distributions in
/// <random> are not, so conversions to floating point and bounded integers
/// are done here by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1).
  double uniform_open01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound) by rejection (no modulo bias).
  std::uint64_t below(std::uint64_t bound);

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed for sub-stream `index` of a run seeded with `seed`.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index);

/// Fisher-Yates permutation of 0..n-1, reproducible across platforms.
std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng);

}  // namespace qsound
