#pragma once

#include <cstdint>
#include <random>

namespace varigame {

/// Seed for run `run_index` of an experiment seeded with `seed_base`.
///
/// z = fmix64(seed_base) + (run_index + 1) * 0x9E3779B97F4A7C15, result = fmix64(z),
/// where fmix64 is the splitmix64 finalizer. Both steps are bijections on 64-bit
/// words and the golden-ratio increment is odd, so for a fixed base the map is
/// injective over all 2^64 run indices. Pure integer arithmetic: identical on
/// every platform.
std::uint64_t derive_run_seed(std::uint64_t seed_base, std::uint64_t run_index);

/// Caller-owned random stream. Wraps mt19937_64 and does its own conversions so
/// draws do not depend on the standard library's distribution implementations.
class RandomStream {
public:
  using engine_type = std::mt19937_64;

  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1).
  double uniform_open() { return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  /// Exponential variate with the given rate (> 0); strictly positive.
  double exponential(double rate);

  engine_type& engine() { return engine_; }

private:
  engine_type engine_;
};

} // namespace varigame
