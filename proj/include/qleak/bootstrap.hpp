#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qleak/error.hpp"
#include "qleak/numeric.hpp"
#include "qleak/parallel.hpp"
#include "qleak/quantiles.hpp"
#include "qleak/rng.hpp"
#include "qleak/series.hpp"

namespace qleak {

enum class BootstrapRegime { continuous_blocks, discrete_subsample };

// Replicate-by-level matrix of centered bootstrap statistics. Row i holds
// replicate i, column k the level k.levels[k].
struct BootstrapMatrix {
  std::vector<double> entries;  // row-major, replicates x levels
  std::size_t replicates = 0;   // B
  std::size_t levels = 0;
  BootstrapRegime regime = BootstrapRegime::continuous_blocks;
  std::size_t m = 1;    // block length used
  std::size_t m1 = 0;   // subsample size (discrete regime only)
  std::size_t n = 0;    // source sample length

  double at(std::size_t i, std::size_t k) const { return entries[i * levels + k]; }
  double& at(std::size_t i, std::size_t k) { return entries[i * levels + k]; }
};

// Per-level spread of the bootstrap replicates. variance is the unbiased
// column variance; sigma is the scale used downstream by the test, which
// for the discrete subsample regime is the column standard deviation
// divided by sqrt(n) so both regimes standardize the unscaled statistic.
struct VarianceVector {
  std::vector<double> variance;
  std::vector<double> sigma;
};

namespace detail {

struct ResamplePlan {
  std::size_t blocks = 0;  // |I|
  std::size_t length = 0;  // blocks * m, no trimming
  std::size_t starts = 0;  // draws come from [0, starts)
};

inline ResamplePlan resample_plan(std::size_t n, std::size_t m, std::size_t target) {
  ResamplePlan plan;
  plan.blocks = (target + m - 1) / m;
  plan.length = plan.blocks * m;
  plan.starts = n - m + 1;
  return plan;
}

// One joint resample: the same block start indices are applied to both
// series, preserving cross-dependence between x and y.
inline void fill_joint_resample(std::mt19937_64& rng, const ResamplePlan& plan,
                                std::span<const double> x, std::span<const double> y,
                                std::size_t m, std::vector<double>& rx, std::vector<double>& ry) {
  rx.resize(plan.length);
  ry.resize(plan.length);
  std::size_t out = 0;
  for (std::size_t b = 0; b < plan.blocks; ++b) {
    const std::size_t s = static_cast<std::size_t>(uniform_index(rng, plan.starts));
    for (std::size_t j = 0; j < m; ++j, ++out) {
      rx[out] = x[s + j];
      ry[out] = y[s + j];
    }
  }
}

inline void check_bootstrap_args(const PairedSample& sample, std::size_t B, std::size_t m) {
  if (m < 1 || m > sample.n()) {
    fail(errc::invalid_block_length, "block length " + std::to_string(m) +
                                         " outside [1, n=" + std::to_string(sample.n()) + "]");
  }
  if (B < 100) {
    fail(errc::invalid_config, "need at least 100 bootstrap replicates, got " + std::to_string(B));
  }
}

}  // namespace detail

// Moving-block bootstrap for the continuous regime: ceil(n/m) block starts
// drawn uniformly with replacement, entry (i,k) is the recentered absolute
// quantile gap |q_k(x*) - q_k(y*)| - |q_k(x) - q_k(y)|.
inline BootstrapMatrix block_bootstrap_continuous(const PairedSample& sample,
                                                  const QuantileLevels& k, std::size_t B,
                                                  std::size_t m, std::uint64_t seed,
                                                  unsigned threads = 1) {
  detail::check_bootstrap_args(sample, B, m);
  const std::size_t n = sample.n();
  const detail::ResamplePlan plan = detail::resample_plan(n, m, n);

  const QuantileVector qx = quantile_vector(sample.x.values, k, DataKind::continuous);
  const QuantileVector qy = quantile_vector(sample.y.values, k, DataKind::continuous);
  std::vector<double> base_gap(k.size());
  for (std::size_t j = 0; j < k.size(); ++j) base_gap[j] = std::fabs(qx.values[j] - qy.values[j]);

  BootstrapMatrix matrix;
  matrix.entries.resize(B * k.size());
  matrix.replicates = B;
  matrix.levels = k.size();
  matrix.regime = BootstrapRegime::continuous_blocks;
  matrix.m = m;
  matrix.n = n;

  parallel_chunks(B, threads, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> rx, ry;
    for (std::size_t i = lo; i < hi; ++i) {
      std::mt19937_64 rng = substream(seed, i);
      detail::fill_joint_resample(rng, plan, sample.x.values, sample.y.values, m, rx, ry);
      std::sort(rx.begin(), rx.end());
      std::sort(ry.begin(), ry.end());
      for (std::size_t j = 0; j < k.size(); ++j) {
        const double gap = std::fabs(quantile_continuous_sorted(rx, k.levels[j]) -
                                     quantile_continuous_sorted(ry, k.levels[j]));
        matrix.at(i, j) = gap - base_gap[j];
      }
    }
  });
  return matrix;
}

// m-out-of-n block bootstrap for the discrete regime: subsample size
// m1 = ceil(n^(2/3)), mid-distribution quantiles throughout, entries carry
// the sqrt(m1) scaling.
inline BootstrapMatrix block_bootstrap_discrete(const PairedSample& sample,
                                                const QuantileLevels& k, std::size_t B,
                                                std::size_t m, std::uint64_t seed,
                                                unsigned threads = 1) {
  detail::check_bootstrap_args(sample, B, m);
  const std::size_t n = sample.n();
  const auto m1 = static_cast<std::size_t>(snapped_ceil(std::pow(static_cast<double>(n), 2.0 / 3.0)));
  const detail::ResamplePlan plan = detail::resample_plan(n, m, m1);
  const double scale = std::sqrt(static_cast<double>(m1));

  const QuantileVector qx = quantile_vector(sample.x.values, k, DataKind::discrete);
  const QuantileVector qy = quantile_vector(sample.y.values, k, DataKind::discrete);
  std::vector<double> base_gap(k.size());
  for (std::size_t j = 0; j < k.size(); ++j) base_gap[j] = std::fabs(qx.values[j] - qy.values[j]);

  BootstrapMatrix matrix;
  matrix.entries.resize(B * k.size());
  matrix.replicates = B;
  matrix.levels = k.size();
  matrix.regime = BootstrapRegime::discrete_subsample;
  matrix.m = m;
  matrix.m1 = m1;
  matrix.n = n;

  parallel_chunks(B, threads, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> rx, ry;
    for (std::size_t i = lo; i < hi; ++i) {
      std::mt19937_64 rng = substream(seed, i);
      detail::fill_joint_resample(rng, plan, sample.x.values, sample.y.values, m, rx, ry);
      std::sort(rx.begin(), rx.end());
      std::sort(ry.begin(), ry.end());
      const DiscreteSupport sx = make_discrete_support(rx);
      const DiscreteSupport sy = make_discrete_support(ry);
      for (std::size_t j = 0; j < k.size(); ++j) {
        const double gap = std::fabs(quantile_mid_distribution(sx, k.levels[j]) -
                                     quantile_mid_distribution(sy, k.levels[j]));
        matrix.at(i, j) = scale * (gap - base_gap[j]);
      }
    }
  });
  return matrix;
}

// Column variances (divisor B-1) and the downstream sigma scale.
inline VarianceVector bootstrap_variances(const BootstrapMatrix& matrix) {
  if (matrix.replicates < 2) {
    fail(errc::invalid_config, "variance needs at least 2 replicates");
  }
  const double B = static_cast<double>(matrix.replicates);
  VarianceVector out;
  out.variance.resize(matrix.levels);
  out.sigma.resize(matrix.levels);
  const double bridge = matrix.regime == BootstrapRegime::discrete_subsample && matrix.n > 0
                            ? std::sqrt(static_cast<double>(matrix.n))
                            : 1.0;
  for (std::size_t j = 0; j < matrix.levels; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < matrix.replicates; ++i) mean += matrix.at(i, j);
    mean /= B;
    double ss = 0.0;
    for (std::size_t i = 0; i < matrix.replicates; ++i) {
      const double d = matrix.at(i, j) - mean;
      ss += d * d;
    }
    out.variance[j] = ss / (B - 1.0);
    out.sigma[j] = std::sqrt(out.variance[j]) / bridge;
  }
  return out;
}

}  // namespace qleak
