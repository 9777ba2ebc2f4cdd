#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace qleak {

// splitmix64 finalizer; used to turn (seed, tag) pairs into engine seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Substream derivation rule: every randomized unit of work (bootstrap
// replicate, simulation rep, generated path) runs on an engine seeded by
// derive_seed(seed, tag). Identical (seed, tag) gives identical draws no
// matter which thread executes the unit or in which order.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
  return mix64(mix64(seed) ^ mix64(tag));
}

inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t tag) {
  return std::mt19937_64(derive_seed(seed, tag));
}

// Uniform draw from [0, bound) by masked rejection. Deliberately avoids
// std::uniform_int_distribution, whose draw sequence is
// implementation-defined; this keeps resampling reproducible across
// standard libraries. Always consumes at least one engine value.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound <= 1) {
    rng();
    return 0;
  }
  const std::uint64_t mask = ~std::uint64_t{0} >> std::countl_zero(bound - 1);
  for (;;) {
    const std::uint64_t v = rng() & mask;
    if (v < bound) return v;
  }
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard normal draws via Box-Muller; self-contained for the same
// reproducibility reason as uniform_index.
class NormalSampler {
 public:
  explicit NormalSampler(std::mt19937_64 rng) : rng_(std::move(rng)) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform_unit(rng_);  // (0, 1]
    const double u2 = uniform_unit(rng_);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace qleak
