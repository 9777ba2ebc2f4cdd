#pragma once

#include <cmath>
#include <cstdint>

namespace qleak {

// Tolerance used whenever a computed real is compared against an exact
// integer or an exact probability level (absorbs decimal-to-binary
// representation error, e.g. 100 * 0.1 != 10 in IEEE arithmetic).
inline constexpr double kLevelTolerance = 1e-12;

inline bool nearly_integer(double t) {
  const double r = std::nearbyint(t);
  return std::fabs(t - r) <= kLevelTolerance * std::fmax(1.0, std::fabs(t));
}

// ceil(t), except that values within kLevelTolerance of an integer snap to
// that integer first. Keeps e.g. pow(1000, 2/3.) from ceiling to 101.
inline std::int64_t snapped_ceil(double t) {
  if (nearly_integer(t)) return static_cast<std::int64_t>(std::llround(t));
  return static_cast<std::int64_t>(std::ceil(t));
}

// floor(t) with the same snap rule (0.7 * 1000 = 699.999... floors to 700).
inline std::int64_t snapped_floor(double t) {
  if (nearly_integer(t)) return static_cast<std::int64_t>(std::llround(t));
  return static_cast<std::int64_t>(std::floor(t));
}

}  // namespace qleak
