#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "qleak/dependence.hpp"
#include "qleak/simulate.hpp"
#include "test_support.hpp"

using namespace qleak;

namespace {

PairedSample make_pair(std::vector<double> x, std::vector<double> y) {
  PairedSample p;
  p.x.values = std::move(x);
  p.y.values = std::move(y);
  return p;
}

std::vector<double> ar1(double phi, std::size_t n, std::uint64_t seed) {
  Ar1Spec spec;
  spec.phi = phi;
  spec.n = n;
  spec.seed = seed;
  return gen_ar1(spec).x.values;
}

// MA(q): average of q+1 consecutive innovations; dependence length q.
std::vector<double> ma(std::size_t q, std::size_t n, std::uint64_t seed) {
  const std::vector<double> eps = testgen::gaussian(n + q, seed);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= q; ++j) acc += eps[i + j];
    out[i] = acc / std::sqrt(static_cast<double>(q + 1));
  }
  return out;
}

}  // namespace

// ===========================================================================
// estimate_block_length
// ===========================================================================

TEST(BlockLength, ConstantSeriesIsDegenerate) {
  const std::vector<double> x(200, 4.0);
  const BlockLengthEstimate e = estimate_block_length(x);
  EXPECT_DOUBLE_EQ(e.value, 1.0);
  EXPECT_TRUE(e.degenerate);
}

TEST(BlockLength, TinySeriesShortCircuitsToOne) {
  const std::vector<double> x{1, 5, 2, 8, 3, 9, 4};
  const BlockLengthEstimate e = estimate_block_length(x);
  EXPECT_DOUBLE_EQ(e.value, 1.0);
  EXPECT_FALSE(e.degenerate);
}

TEST(BlockLength, WhiteNoiseEstimatesSmall) {
  // iid data: theoretical optimum is 1; allow estimator noise up to 4.
  int small = 0;
  const int runs = 200;
  for (int r = 0; r < runs; ++r) {
    const std::vector<double> x = testgen::gaussian(10000, 1000 + r);
    const BlockLengthEstimate e = estimate_block_length(x);
    EXPECT_GE(e.value, 1.0);
    if (e.value <= 4.0) ++small;
  }
  EXPECT_GE(small, static_cast<int>(0.95 * runs));
}

TEST(BlockLength, StrongDependenceBeatsWhiteNoise) {
  int ordered = 0;
  const int runs = 200;
  for (int r = 0; r < runs; ++r) {
    const double dependent = estimate_block_length(ar1(0.9, 10000, 5000 + r)).value;
    const double independent = estimate_block_length(ar1(0.0, 10000, 5000 + r)).value;
    if (dependent > independent) ++ordered;
  }
  EXPECT_GE(ordered, static_cast<int>(0.95 * runs));
}

TEST(BlockLength, MaOrderGrowsTheMedianEstimate) {
  const std::vector<std::size_t> orders{0, 2, 6};
  std::vector<double> medians;
  for (const std::size_t q : orders) {
    std::vector<double> estimates;
    for (int r = 0; r < 50; ++r) {
      estimates.push_back(estimate_block_length(ma(q, 10000, 9000 + r)).value);
    }
    std::sort(estimates.begin(), estimates.end());
    medians.push_back(estimates[estimates.size() / 2]);
  }
  EXPECT_LE(medians[0], medians[1]);
  EXPECT_LE(medians[1], medians[2]);
}

TEST(BlockLength, InvariantUnderShiftAndScale) {
  for (int r = 0; r < 200; ++r) {
    const std::vector<double> x = ar1(0.6, 2000, 777 + r);
    std::vector<double> moved(x);
    for (auto& v : moved) v = 3.5 * v + 100.0;
    const double a = estimate_block_length(x).value;
    const double b = estimate_block_length(moved).value;
    EXPECT_NEAR(a, b, 1e-6 * std::max(1.0, a));
  }
}

TEST(BlockLength, StaysWithinClip) {
  for (int r = 0; r < 20; ++r) {
    const std::vector<double> x = ar1(0.95, 4000, 31 + r);
    const double cap = 3.0 * std::ceil(std::cbrt(4000.0));
    const double v = estimate_block_length(x).value;
    EXPECT_GE(v, 1.0);
    EXPECT_LE(v, cap);
  }
}

// ===========================================================================
// estimate_pair_dependence
// ===========================================================================

TEST(PairDependence, CeilingOfMaxRule) {
  EXPECT_EQ(combine_block_lengths(2.3, 5.1, 1000), 6u);
  EXPECT_EQ(combine_block_lengths(5.1, 2.3, 1000), 6u);
  EXPECT_EQ(combine_block_lengths(4.0, 1.0, 1000), 4u);
}

TEST(PairDependence, ClipsToHalfN) {
  EXPECT_EQ(combine_block_lengths(700.0, 1.0, 1000), 500u);
  EXPECT_EQ(combine_block_lengths(0.2, 0.4, 1000), 1u);
}

TEST(PairDependence, IidPairsEstimateSmall) {
  int small = 0;
  const int runs = 100;
  for (int r = 0; r < runs; ++r) {
    const PairedSample p =
        make_pair(testgen::gaussian(10000, 100 + r), testgen::gaussian(10000, 90000 + r));
    const DependenceEstimate e = estimate_pair_dependence(p);
    EXPECT_GE(e.m, 1u);
    EXPECT_LE(e.m, 5000u);
    if (e.m <= 4) ++small;
  }
  EXPECT_GE(small, static_cast<int>(0.95 * runs));
}

TEST(PairDependence, BoundsHoldAlways) {
  std::mt19937_64 rng(5);
  for (int r = 0; r < 200; ++r) {
    const std::size_t n = 2 + rng() % 400;
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = static_cast<double>(rng() % 7);
    for (auto& v : y) v = static_cast<double>(rng() % 7);
    const DependenceEstimate e = estimate_pair_dependence(make_pair(x, y));
    EXPECT_GE(e.m, 1u);
    EXPECT_LE(e.m, std::max<std::size_t>(1, n / 2));
  }
}

TEST(PairDependence, DegenerateFlagPropagates) {
  const PairedSample p = make_pair(std::vector<double>(100, 2.0), testgen::gaussian(100, 8));
  const DependenceEstimate e = estimate_pair_dependence(p);
  EXPECT_TRUE(e.degenerate);
  EXPECT_DOUBLE_EQ(e.raw_x, 1.0);
}
