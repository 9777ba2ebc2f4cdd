#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qleak/bootstrap.hpp"
#include "qleak/dependence.hpp"
#include "qleak/error.hpp"
#include "qleak/numeric.hpp"
#include "qleak/quantiles.hpp"
#include "qleak/series.hpp"

namespace qleak {

struct TestConfig {
  double alpha = 0.1;
  double delta = 0.0;  // negligibility threshold, measurement units
  QuantileLevels levels = QuantileLevels::percentiles();
  std::size_t replicates = 1000;  // B
  std::uint64_t seed = 0;
  std::optional<DataKind> kind_override;
  BlockLengthConfig block_length{};

  void validate() const {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
      fail(errc::invalid_config, "alpha must lie in (0, 1)");
    }
    if (!(delta >= 0.0) || !std::isfinite(delta)) {
      fail(errc::invalid_config, "delta must be finite and nonnegative");
    }
    if (replicates < 100) {
      fail(errc::invalid_config, "need at least 100 bootstrap replicates");
    }
    if (levels.size() == 0) fail(errc::invalid_config, "empty quantile level set");
  }
};

enum class Decision { violation, no_violation };

inline std::string_view decision_name(Decision d) {
  return d == Decision::violation ? "violation" : "no_violation";
}

struct LevelDiagnostics {
  double level = 0.0;
  double qx = 0.0;
  double qy = 0.0;
  double gap = 0.0;       // |qx - qy|
  double sigma = 0.0;     // downstream scale (bridged in the discrete regime)
  double variance = 0.0;  // raw bootstrap column variance
  bool in_k_sub = false;
  bool in_k_sub_max = false;
};

struct TestResult {
  Decision decision = Decision::no_violation;
  // -infinity when no level survives the relevance filter; +infinity when a
  // zero-noise gap above delta forces the decision.
  double statistic = -std::numeric_limits<double>::infinity();
  double threshold = std::numeric_limits<double>::quiet_NaN();  // NaN when not computed
  double alpha = 0.0;
  double delta = 0.0;
  std::size_t n = 0;
  DependenceEstimate dependence;
  DataKindInfo kind;
  BootstrapRegime regime = BootstrapRegime::continuous_blocks;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  bool degenerate = false;  // both series constant and equal
  std::vector<LevelDiagnostics> levels;
};

// Variance filter: keep levels whose bootstrap variance stays below five
// times the mean over the candidate set.
inline std::vector<std::size_t> select_k_sub(std::span<const double> variances) {
  std::vector<std::size_t> kept;
  if (variances.empty()) return kept;
  double mean = 0.0;
  for (const double v : variances) mean += v;
  mean /= static_cast<double>(variances.size());
  const double bound = 5.0 * mean;
  for (std::size_t j = 0; j < variances.size(); ++j) {
    if (variances[j] < bound) kept.push_back(j);
  }
  return kept;
}

// Sample-size-driven slack of the relevance filter.
inline double relevance_slack(std::size_t n) {
  const double ln = std::log(static_cast<double>(n));
  return 30.0 * std::sqrt(std::pow(ln, 1.5) / static_cast<double>(n));
}

// Relevance filter: keep levels whose standardized gap plus slack reaches
// the standardized threshold, i.e. gaps that plausibly exceed delta.
inline std::vector<std::size_t> select_k_sub_max(std::span<const double> gaps,
                                                 std::span<const double> sigma, double delta,
                                                 std::size_t n,
                                                 std::span<const std::size_t> k_sub) {
  const double slack = relevance_slack(n);
  std::vector<std::size_t> kept;
  for (const std::size_t j : k_sub) {
    if (gaps[j] / sigma[j] + slack >= delta / sigma[j]) kept.push_back(j);
  }
  return kept;
}

// Max of the standardized exceedances over the active levels; -infinity on
// an empty set.
inline double test_statistic(std::span<const double> gaps, std::span<const double> sigma,
                             double delta, std::span<const std::size_t> k_sub_max) {
  if (k_sub_max.empty()) return -std::numeric_limits<double>::infinity();
  double best = -std::numeric_limits<double>::infinity();
  for (const std::size_t j : k_sub_max) {
    best = std::max(best, (gaps[j] - delta) / sigma[j]);
  }
  return best;
}

// Critical value: the floor((1-alpha)*B)-th order statistic (1-indexed,
// ascending) of the per-replicate maxima of the standardized bootstrap
// columns. sigma must be the same scale vector used for the statistic; the
// discrete-regime bridge cancels between column and sigma.
inline double bootstrap_threshold(const BootstrapMatrix& matrix, std::span<const double> sigma,
                                  std::span<const std::size_t> k_sub_max, double alpha) {
  if (k_sub_max.empty()) fail(errc::empty_active_set, "no active quantile levels");
  const double bridge = matrix.regime == BootstrapRegime::discrete_subsample && matrix.n > 0
                            ? std::sqrt(static_cast<double>(matrix.n))
                            : 1.0;
  std::vector<double> denom(k_sub_max.size());
  for (std::size_t c = 0; c < k_sub_max.size(); ++c) denom[c] = sigma[k_sub_max[c]] * bridge;

  std::vector<double> maxima(matrix.replicates);
  for (std::size_t i = 0; i < matrix.replicates; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k_sub_max.size(); ++c) {
      best = std::max(best, matrix.at(i, k_sub_max[c]) / denom[c]);
    }
    maxima[i] = best;
  }
  std::sort(maxima.begin(), maxima.end());
  const auto B = static_cast<double>(matrix.replicates);
  const std::int64_t idx =
      std::clamp<std::int64_t>(snapped_floor((1.0 - alpha) * B), 1,
                               static_cast<std::int64_t>(matrix.replicates));
  return maxima[static_cast<std::size_t>(idx - 1)];
}

// Full test: classify the data, estimate quantiles and dependence, run the
// matching bootstrap, filter levels, compare statistic against threshold.
inline TestResult run_test(const PairedSample& sample, const TestConfig& cfg,
                           unsigned threads = 1) {
  cfg.validate();
  const std::size_t n = sample.n();
  if (n < 1) fail(errc::empty_input, "empty sample");

  TestResult result;
  result.alpha = cfg.alpha;
  result.delta = cfg.delta;
  result.n = n;
  result.replicates = cfg.replicates;
  result.seed = cfg.seed;

  result.kind = classify_data_kind(sample);
  if (cfg.kind_override) result.kind.kind = *cfg.kind_override;
  const bool discrete = result.kind.kind == DataKind::discrete;

  const QuantileVector qx = quantile_vector(sample.x.values, cfg.levels, result.kind.kind);
  const QuantileVector qy = quantile_vector(sample.y.values, cfg.levels, result.kind.kind);

  result.dependence = estimate_pair_dependence(sample, cfg.block_length);
  const std::size_t m = result.dependence.m;

  const BootstrapMatrix matrix =
      discrete
          ? block_bootstrap_discrete(sample, cfg.levels, cfg.replicates, m, cfg.seed, threads)
          : block_bootstrap_continuous(sample, cfg.levels, cfg.replicates, m, cfg.seed, threads);
  result.regime = matrix.regime;
  const VarianceVector var = bootstrap_variances(matrix);

  const std::size_t L = cfg.levels.size();
  std::vector<double> gaps(L);
  result.levels.resize(L);
  for (std::size_t j = 0; j < L; ++j) {
    gaps[j] = std::fabs(qx.values[j] - qy.values[j]);
    auto& d = result.levels[j];
    d.level = cfg.levels.levels[j];
    d.qx = qx.values[j];
    d.qy = qy.values[j];
    d.gap = gaps[j];
    d.sigma = var.sigma[j];
    d.variance = var.variance[j];
  }

  // Both series constant and equal: nothing to test, report instead of
  // erroring so pipelines survive trivially constant-time stubs.
  const auto constant = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [&](double e) { return e == v.front(); });
  };
  if (constant(sample.x.values) && constant(sample.y.values) &&
      sample.x.values.front() == sample.y.values.front()) {
    result.degenerate = true;
  }

  // A level with zero resampling noise and a gap above delta is a certain
  // leak; zero-noise levels at or below delta drop out before the variance
  // filter sees them.
  bool forced_violation = false;
  std::vector<std::size_t> candidates;
  candidates.reserve(L);
  for (std::size_t j = 0; j < L; ++j) {
    if (var.sigma[j] > 0.0) {
      candidates.push_back(j);
    } else if (gaps[j] > cfg.delta) {
      forced_violation = true;
      result.levels[j].in_k_sub = true;
      result.levels[j].in_k_sub_max = true;
    }
  }

  std::vector<double> candidate_var(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) candidate_var[c] = var.variance[candidates[c]];
  std::vector<std::size_t> k_sub;
  for (const std::size_t local : select_k_sub(candidate_var)) k_sub.push_back(candidates[local]);
  for (const std::size_t j : k_sub) result.levels[j].in_k_sub = true;

  const std::vector<std::size_t> k_sub_max =
      select_k_sub_max(gaps, var.sigma, cfg.delta, n, k_sub);
  for (const std::size_t j : k_sub_max) result.levels[j].in_k_sub_max = true;

  if (!k_sub_max.empty()) {
    result.statistic = test_statistic(gaps, var.sigma, cfg.delta, k_sub_max);
    result.threshold = bootstrap_threshold(matrix, var.sigma, k_sub_max, cfg.alpha);
    result.decision = result.statistic > result.threshold ? Decision::violation
                                                          : Decision::no_violation;
  }

  if (forced_violation) {
    result.decision = Decision::violation;
    result.statistic = std::numeric_limits<double>::infinity();
  }
  return result;
}

}  // namespace qleak
