#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace uard {

// Deterministic 64-bit generator (SplitMix64, Steele et al. 2014).
// Chosen over std::mt19937 + std:: distributions because the standard
// distributions are implementation-defined: identical seeds can produce
// different values across standard libraries. Everything here is fully
// specified, so runs are reproducible byte-for-byte on any platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double next_range(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
  }

  // Uniform integer in [0, n). Rejection sampling keeps it unbiased.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Standard normal via Box-Muller (cosine branch). The sine companion is
  // discarded so every call consumes exactly two raw draws, which keeps
  // stream alignment independent of call history.
  double next_gaussian() {
    double u1 = next_unit();
    while (u1 == 0.0) u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  double next_gaussian(double mean, double stddev) {
    return mean + stddev * next_gaussian();
  }

 private:
  std::uint64_t state_;
};

// Derives an independent stream seed from (base_seed, run_index, label).
// FNV-1a folds the label into the state between SplitMix64 finalizer
// passes, so distinct labels or indices give uncorrelated streams and the
// mapping is stable across platforms and runs.
inline std::uint64_t derive_stream(std::uint64_t base_seed,
                                   std::uint64_t run_index,
                                   std::string_view label) {
  auto finalize = [](std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  std::uint64_t h = finalize(base_seed + 0x9e3779b97f4a7c15ull);
  h = finalize(h ^ (run_index + 0x9e3779b97f4a7c15ull));
  std::uint64_t fnv = 0xcbf29ce484222325ull;
  for (const char c : label) {
    fnv ^= static_cast<unsigned char>(c);
    fnv *= 0x100000001b3ull;
  }
  return finalize(h ^ fnv);
}

}  // namespace uard
