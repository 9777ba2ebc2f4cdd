#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "qleak/bootstrap.hpp"
#include "qleak/dependence.hpp"
#include "qleak/detector.hpp"
#include "qleak/error.hpp"
#include "qleak/numeric.hpp"
#include "qleak/quantiles.hpp"
#include "qleak/series.hpp"

namespace qleak {

// Which scale summary feeds the sample-size formula: shift-type leaks use
// the smallest quantile scale, local/unknown leaks the conservative median.
enum class SigmaVariant { min_over_k_sub, median_over_k_sub };

inline std::string_view sigma_variant_name(SigmaVariant v) {
  return v == SigmaVariant::min_over_k_sub ? "MinOverKsub" : "MedianOverKsub";
}

enum class PowerFormula { theorem_derived, paper_literal };

inline std::string_view power_formula_name(PowerFormula f) {
  return f == PowerFormula::theorem_derived ? "TheoremDerived" : "PaperLiteral";
}

struct PowerRequest {
  double mu = 0.0;     // expected leak size, measurement units
  double delta = 0.0;  // negligibility threshold
  double power = 0.9;  // target detection rate p
  double alpha = 0.1;
  bool shift = false;
  PowerFormula formula = PowerFormula::theorem_derived;
  QuantileLevels levels = QuantileLevels::percentiles();
  std::size_t replicates = 1000;
  std::uint64_t seed = 0;
  BlockLengthConfig block_length{};

  void validate() const {
    if (!(delta >= 0.0) || !std::isfinite(delta)) {
      fail(errc::invalid_request, "delta must be finite and nonnegative");
    }
    if (!(mu > delta)) {
      fail(errc::invalid_request, "the expected leak mu must exceed the threshold delta");
    }
    if (!(power > 0.0) || !(power < 1.0)) fail(errc::invalid_request, "p must lie in (0, 1)");
    if (!(alpha > 0.0) || !(alpha < 1.0)) fail(errc::invalid_request, "alpha must lie in (0, 1)");
    if (replicates < 100) fail(errc::invalid_request, "need at least 100 bootstrap replicates");
  }
};

struct PowerResult {
  std::size_t n = 0;        // recommended sample size, >= 100
  double n_sub = 0.0;       // raw formula value before the floor
  double sigma_hat = 0.0;   // scale fed into the formula
  SigmaVariant variant = SigmaVariant::median_over_k_sub;
  PowerFormula formula = PowerFormula::theorem_derived;
  std::size_t pilot_n = 0;
  std::size_t m = 0;
  // All three scale candidates (already sqrt(pilot_n)-scaled), for reports.
  double sigma_min = 0.0;
  double sigma_median = 0.0;
  double sigma_max = 0.0;
};

inline double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

// Raw sample size for a given asymptotic scale. The default inverts the
// normal power approximation P(Z > z_{1-alpha} - sqrt(n)(mu-delta)/sigma) = p;
// paper_literal keeps the alternative printed form behind a flag.
inline double power_sample_size(double sigma_hat, double mu, double delta, double p, double alpha,
                                PowerFormula formula = PowerFormula::theorem_derived) {
  const double gap = mu - delta;
  if (formula == PowerFormula::paper_literal) {
    const double num = normal_quantile(1.0 - p) / sigma_hat - normal_quantile(1.0 - alpha) * sigma_hat;
    return (num / gap) * (num / gap);
  }
  const double num = sigma_hat * (normal_quantile(1.0 - alpha) + normal_quantile(p));
  return (num / gap) * (num / gap);
}

namespace detail {

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  if (v.size() % 2 == 1) return v[h];
  return 0.5 * (v[h - 1] + v[h]);
}

}  // namespace detail

// Pilot-driven sample-size estimate: bootstrap the pilot to measure the
// per-level scales, summarize them per the shift flag, invert the power
// approximation, floor at 100.
inline PowerResult estimate_sample_size(const PairedSample& pilot, const PowerRequest& req,
                                        unsigned threads = 1) {
  req.validate();
  const std::size_t pilot_n = pilot.n();
  if (pilot_n < 100) {
    fail(errc::pilot_too_small,
         "pilot has " + std::to_string(pilot_n) + " pairs; need at least 100");
  }

  const DataKindInfo kind = classify_data_kind(pilot);
  const DependenceEstimate dep = estimate_pair_dependence(pilot, req.block_length);
  const BootstrapMatrix matrix =
      kind.kind == DataKind::discrete
          ? block_bootstrap_discrete(pilot, req.levels, req.replicates, dep.m, req.seed, threads)
          : block_bootstrap_continuous(pilot, req.levels, req.replicates, dep.m, req.seed,
                                       threads);
  const VarianceVector var = bootstrap_variances(matrix);

  std::vector<std::size_t> candidates;
  std::vector<double> candidate_var;
  for (std::size_t j = 0; j < var.sigma.size(); ++j) {
    if (var.sigma[j] > 0.0) {
      candidates.push_back(j);
      candidate_var.push_back(var.variance[j]);
    }
  }
  if (candidates.empty()) {
    fail(errc::invalid_request, "pilot is degenerate: no quantile level has positive scale");
  }
  std::vector<double> scales;
  for (const std::size_t local : select_k_sub(candidate_var)) {
    scales.push_back(var.sigma[candidates[local]]);
  }

  const double root_n = std::sqrt(static_cast<double>(pilot_n));
  PowerResult out;
  out.formula = req.formula;
  out.pilot_n = pilot_n;
  out.m = dep.m;
  out.sigma_min = root_n * *std::min_element(scales.begin(), scales.end());
  out.sigma_max = root_n * *std::max_element(scales.begin(), scales.end());
  out.sigma_median = root_n * detail::median_of(scales);
  out.variant = req.shift ? SigmaVariant::min_over_k_sub : SigmaVariant::median_over_k_sub;
  out.sigma_hat = req.shift ? out.sigma_min : out.sigma_median;
  out.n_sub = power_sample_size(out.sigma_hat, req.mu, req.delta, req.power, req.alpha,
                                req.formula);
  out.n = static_cast<std::size_t>(snapped_ceil(std::max(100.0, out.n_sub)));
  return out;
}

}  // namespace qleak
