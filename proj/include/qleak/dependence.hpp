#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "qleak/numeric.hpp"
#include "qleak/series.hpp"

namespace qleak {

// Tuning constants of the automatic block-length selector. Defaults follow
// the reference-implementation convention; all overridable.
struct BlockLengthConfig {
  double band_constant = 2.0;   // autocorrelation significance band: c*sqrt(log10(n)/n)
  std::size_t min_n = 32;       // below this the estimate is pinned to 1
  double clip_factor = 3.0;     // upper clip: clip_factor * ceil(n^(1/3))
};

struct BlockLengthEstimate {
  double value = 1.0;      // optimal block length, as a real >= 1
  bool degenerate = false; // zero-variance input
};

// Combined block length for a pair plus the raw per-series values, kept for
// diagnostics.
struct DependenceEstimate {
  std::size_t m = 1;  // ceil(max(raw_x, raw_y)), clipped to [1, n/2]
  double raw_x = 1.0;
  double raw_y = 1.0;
  bool degenerate = false;  // either series had zero variance
};

namespace detail {

// Flat-top (trapezoidal) lag window.
inline double flat_top(double t) {
  const double a = std::fabs(t);
  if (a <= 0.5) return 1.0;
  if (a <= 1.0) return 2.0 * (1.0 - a);
  return 0.0;
}

// Autocovariances gamma(0..max_lag), divisor n.
inline std::vector<double> autocovariances(std::span<const double> x, std::size_t max_lag) {
  const std::size_t n = x.size();
  double mean = 0.0;
  for (const double v : x) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> gamma(max_lag + 1, 0.0);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    double acc = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) {
      acc += (x[t] - mean) * (x[t + lag] - mean);
    }
    gamma[lag] = acc / static_cast<double>(n);
  }
  return gamma;
}

}  // namespace detail

// Automatic block-length selection for the circular/moving block bootstrap:
// scan sample autocorrelations for the first run of insignificant lags,
// then plug flat-top-weighted autocovariances into the
// (2 g^2 / D)^(1/3) n^(1/3) rule.
inline BlockLengthEstimate estimate_block_length(std::span<const double> x,
                                                 const BlockLengthConfig& cfg = {}) {
  const std::size_t n = x.size();
  if (n < cfg.min_n) return {1.0, false};

  const double log10n = std::log10(static_cast<double>(n));
  const auto lag_cap = std::min<std::size_t>(
      std::max<std::size_t>(5, 2 * static_cast<std::size_t>(std::ceil(log10n))), n - 1);
  const auto run_len =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(log10n))));
  const double band = cfg.band_constant * std::sqrt(log10n / static_cast<double>(n));

  const std::size_t cov_cap = std::min<std::size_t>(2 * lag_cap, n - 1);
  const std::vector<double> gamma = detail::autocovariances(x, cov_cap);
  if (!(gamma[0] > 0.0)) return {1.0, true};

  // Smallest lag from which run_len consecutive autocorrelations sit inside
  // the band; if no such run, the largest significant lag.
  std::size_t m_hat = 0;
  for (std::size_t j = 1; j + run_len - 1 <= lag_cap && m_hat == 0; ++j) {
    bool quiet = true;
    for (std::size_t r = 0; r < run_len && quiet; ++r) {
      quiet = std::fabs(gamma[j + r] / gamma[0]) < band;
    }
    if (quiet) m_hat = j;
  }
  if (m_hat == 0) {
    for (std::size_t j = 1; j <= lag_cap; ++j) {
      if (std::fabs(gamma[j] / gamma[0]) >= band) m_hat = j;
    }
    if (m_hat == 0) m_hat = 1;
  }

  const std::size_t window = std::min(std::max<std::size_t>(2 * m_hat, 1), cov_cap);
  double g_hat = 0.0;
  double sum = gamma[0];
  for (std::size_t k = 1; k <= window; ++k) {
    const double w = detail::flat_top(static_cast<double>(k) / static_cast<double>(window));
    g_hat += 2.0 * w * static_cast<double>(k) * gamma[k];
    sum += 2.0 * w * gamma[k];
  }
  const double d_hat = (4.0 / 3.0) * sum * sum;
  if (!(d_hat > 0.0) || !std::isfinite(d_hat)) return {1.0, false};

  const double n_third = std::cbrt(static_cast<double>(n));
  double b = std::cbrt(2.0 * g_hat * g_hat / d_hat) * n_third;
  const double cap = cfg.clip_factor * static_cast<double>(snapped_ceil(n_third));
  b = std::clamp(b, 1.0, cap);
  return {b, false};
}

// One m for both series and both bootstrap draws: the ceiling of the larger
// per-series estimate, conservative toward longer dependence, clipped to
// [1, n/2].
inline std::size_t combine_block_lengths(double raw_x, double raw_y, std::size_t n) {
  const auto ceiling = snapped_ceil(std::max(raw_x, raw_y));
  const std::size_t half = std::max<std::size_t>(1, n / 2);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max<std::int64_t>(ceiling, 1)), 1,
                                 half);
}

inline DependenceEstimate estimate_pair_dependence(const PairedSample& sample,
                                                   const BlockLengthConfig& cfg = {}) {
  const BlockLengthEstimate ex = estimate_block_length(sample.x.values, cfg);
  const BlockLengthEstimate ey = estimate_block_length(sample.y.values, cfg);
  DependenceEstimate out;
  out.raw_x = ex.value;
  out.raw_y = ey.value;
  out.degenerate = ex.degenerate || ey.degenerate;
  out.m = combine_block_lengths(ex.value, ey.value, sample.n());
  return out;
}

}  // namespace qleak
