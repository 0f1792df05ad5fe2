#include <algorithm>
#include <bit>
#include <vector>

#include <stdexcept>

#include <doctest.h>

#include "varigame/random.hpp"

using namespace varigame;

TEST_CASE("run seeds are distinct over a million indices") {
  for (std::uint64_t base : {0ULL, 1ULL, 20240601ULL, 0xFFFFFFFFFFFFFFFFULL}) {
    std::vector<std::uint64_t> seeds(1'000'000);
    for (std::uint64_t i = 0; i < seeds.size(); ++i) seeds[i] = derive_run_seed(base, i);
    std::sort(seeds.begin(), seeds.end());
    CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
  }
}

TEST_CASE("run seeds are pinned across platforms") {
  // splitmix64 finalizer applied twice; reference values computed by hand-rolled
  // arithmetic below, not by the function under test.
  auto mix = [](std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  for (std::uint64_t base : {0ULL, 7ULL, 123456789ULL})
    for (std::uint64_t i : {0ULL, 1ULL, 99ULL})
      CHECK(derive_run_seed(base, i) == mix(mix(base) + (i + 1) * 0x9E3779B97F4A7C15ULL));
  // splitmix64 reference stream from seed 0 starts 0xE220A8397B1DCDAF.
  CHECK(mix(0x9E3779B97F4A7C15ULL) == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("flipping one bit of the base flips about half the output bits") {
  double total = 0.0;
  int samples = 0;
  for (std::uint64_t base = 1; base <= 200; ++base)
    for (int bit = 0; bit < 64; ++bit)
      for (std::uint64_t run : {0ULL, 5ULL}) {
        const auto a = derive_run_seed(base * 0x1234567ULL, run);
        const auto b = derive_run_seed((base * 0x1234567ULL) ^ (1ULL << bit), run);
        total += std::popcount(a ^ b);
        ++samples;
      }
  const double mean = total / samples;
  CHECK(mean > 31.5);
  CHECK(mean < 32.5);
}

TEST_CASE("uniform draws stay in range and below is unbiased") {
  RandomStream rng(42);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 700'000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const double o = rng.uniform_open();
    REQUIRE(o > 0.0);
    REQUIRE(o < 1.0);
    ++counts[rng.below(7)];
  }
  for (int c : counts) CHECK(std::abs(c - 100'000) < 1500);
}

TEST_CASE("streams are reproducible") {
  RandomStream a(9), b(9);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next() == b.next());
  CHECK(a.exponential(2.0) == b.exponential(2.0));
}
