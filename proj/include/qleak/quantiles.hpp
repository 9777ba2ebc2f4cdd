#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "qleak/error.hpp"
#include "qleak/numeric.hpp"
#include "qleak/series.hpp"

namespace qleak {

// Strictly increasing probability levels in (0, 1).
struct QuantileLevels {
  std::vector<double> levels;

  static QuantileLevels from(std::vector<double> values) {
    if (values.empty()) fail(errc::invalid_level, "need at least one quantile level");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!(values[i] > 0.0) || !(values[i] < 1.0)) {
        fail(errc::invalid_level, "quantile level " + std::to_string(values[i]) +
                                      " outside the open interval (0, 1)");
      }
      if (i > 0 && !(values[i] > values[i - 1])) {
        fail(errc::invalid_level, "quantile levels must be strictly increasing");
      }
    }
    QuantileLevels k;
    k.levels = std::move(values);
    return k;
  }

  static QuantileLevels percentiles() { return grid(99); }
  static QuantileLevels deciles() { return grid(9); }

  static QuantileLevels quartiles() { return from({0.25, 0.5, 0.75}); }

  std::size_t size() const noexcept { return levels.size(); }

 private:
  static QuantileLevels grid(int count) {
    std::vector<double> v(count);
    for (int i = 1; i <= count; ++i) v[i - 1] = static_cast<double>(i) / (count + 1);
    return from(std::move(v));
  }
};

struct QuantileVector {
  std::vector<double> levels;
  std::vector<double> values;
};

namespace detail {

inline void require_level(double k) {
  if (!(k > 0.0) || !(k < 1.0)) {
    fail(errc::invalid_level,
         "quantile level " + std::to_string(k) + " outside the open interval (0, 1)");
  }
}

}  // namespace detail

// Rank-statistic quantile on pre-sorted data: the ceil(n*k)-th order
// statistic, or the midpoint of the two adjacent ones when n*k lands on an
// integer.
inline double quantile_continuous_sorted(std::span<const double> sorted, double k) {
  detail::require_level(k);
  if (sorted.empty()) fail(errc::empty_input, "quantile of empty series");
  const std::size_t n = sorted.size();
  const double t = static_cast<double>(n) * k;
  if (nearly_integer(t)) {
    const auto r = static_cast<std::size_t>(std::llround(t));
    if (r >= 1 && r < n) return 0.5 * (sorted[r - 1] + sorted[r]);
    if (r >= n) return sorted[n - 1];
    // r == 0 only when k is vanishingly small; fall through to ceil.
  }
  const auto idx = static_cast<std::size_t>(std::ceil(t));
  return sorted[std::min(idx, n) - 1];
}

inline double empirical_quantile_continuous(std::span<const double> x, double k) {
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  return quantile_continuous_sorted(sorted, k);
}

// Distinct support values with their mid-distribution CDF
// pi_j = P(X < x_j) + P(X = x_j)/2. Built once per series, then each level
// lookup is a binary search.
struct DiscreteSupport {
  std::vector<double> values;   // x_1 < ... < x_d
  std::vector<double> mid_cdf;  // pi_1 < ... < pi_d
};

inline DiscreteSupport make_discrete_support(std::span<const double> sorted) {
  if (sorted.empty()) fail(errc::empty_input, "support of empty series");
  DiscreteSupport s;
  const double n = static_cast<double>(sorted.size());
  std::size_t i = 0;
  double below = 0.0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double p = static_cast<double>(j - i) / n;
    s.values.push_back(sorted[i]);
    s.mid_cdf.push_back(below + 0.5 * p);
    below += p;
    i = j;
  }
  return s;
}

// Mid-distribution quantile: x_1 below pi_1, x_d above pi_d, x_j at
// k == pi_j (within kLevelTolerance), linear interpolation between
// adjacent support points otherwise.
inline double quantile_mid_distribution(const DiscreteSupport& support, double k) {
  detail::require_level(k);
  const auto& pi = support.mid_cdf;
  const auto& xs = support.values;
  const std::size_t d = xs.size();
  if (k < pi.front()) return xs.front();
  if (k > pi.back()) return xs.back();
  // First segment with pi[j] <= k <= pi[j+1].
  const auto it = std::upper_bound(pi.begin(), pi.end(), k);
  std::size_t j = static_cast<std::size_t>(it - pi.begin());
  j = j == 0 ? 0 : j - 1;
  if (std::fabs(k - pi[j]) <= kLevelTolerance) return xs[j];
  if (j + 1 < d && std::fabs(k - pi[j + 1]) <= kLevelTolerance) return xs[j + 1];
  if (j + 1 >= d) return xs.back();
  const double lambda = (pi[j + 1] - k) / (pi[j + 1] - pi[j]);
  // b - lambda*(b - a) rather than lambda*a + (1-lambda)*b: monotone in k
  // under IEEE rounding, which keeps quantile vectors nondecreasing.
  return xs[j + 1] - lambda * (xs[j + 1] - xs[j]);
}

inline double mid_distribution_quantile(std::span<const double> x, double k) {
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  return quantile_mid_distribution(make_discrete_support(sorted), k);
}

// All levels at once with the estimator matching the data kind. Sorts the
// input a single time.
inline QuantileVector quantile_vector(std::span<const double> x, const QuantileLevels& k,
                                      DataKind kind) {
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  QuantileVector out;
  out.levels = k.levels;
  out.values.reserve(k.size());
  if (kind == DataKind::continuous) {
    for (const double level : k.levels) {
      out.values.push_back(quantile_continuous_sorted(sorted, level));
    }
  } else {
    const DiscreteSupport support = make_discrete_support(sorted);
    for (const double level : k.levels) {
      out.values.push_back(quantile_mid_distribution(support, level));
    }
  }
  return out;
}

}  // namespace qleak
