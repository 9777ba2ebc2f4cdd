#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qleak/detector.hpp"
#include "qleak/error.hpp"
#include "qleak/parallel.hpp"
#include "qleak/rng.hpp"
#include "qleak/series.hpp"

namespace qleak {

// Ground-truth generator: two independent AR(1) paths with Gaussian
// innovations; the y path is shifted by mu_shift after generation.
struct Ar1Spec {
  double phi = 0.0;       // dependence, |phi| < 1
  double sigma = 1.0;     // innovation standard deviation
  double mu_shift = 0.0;  // applied to y
  std::size_t n = 0;
  std::size_t burn_in = 1000;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(std::fabs(phi) < 1.0)) {
      fail(errc::invalid_spec, "AR(1) requires |phi| < 1, got " + std::to_string(phi));
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
      fail(errc::invalid_spec, "innovation sigma must be positive");
    }
    if (n < 1) fail(errc::invalid_spec, "need n >= 1");
  }
};

namespace detail {

inline std::vector<double> ar1_path(double phi, double sigma, std::size_t n, std::size_t burn_in,
                                    std::mt19937_64 rng) {
  NormalSampler normal(std::move(rng));
  double y = 0.0;
  for (std::size_t i = 0; i < burn_in; ++i) y = phi * y + sigma * normal();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    y = phi * y + sigma * normal();
    out[i] = y;
  }
  return out;
}

}  // namespace detail

inline PairedSample gen_ar1(const Ar1Spec& spec) {
  spec.validate();
  PairedSample sample;
  sample.x.values = detail::ar1_path(spec.phi, spec.sigma, spec.n, spec.burn_in,
                                     substream(spec.seed, 0));
  sample.y.values = detail::ar1_path(spec.phi, spec.sigma, spec.n, spec.burn_in,
                                     substream(spec.seed, 1));
  for (double& v : sample.y.values) v += spec.mu_shift;
  sample.x.label = "x";
  sample.y.label = "y";
  sample.x.unit = sample.y.unit = Unit::unitless;
  return sample;
}

// Monte Carlo rejection-rate experiment over a (phi, mu) grid.
struct GridSpec {
  std::vector<double> phi_values;
  std::vector<double> mu_values;
  std::size_t n = 1000;
  double delta = 0.0;
  double alpha = 0.1;
  std::size_t replicates = 1000;  // bootstrap B per test
  std::size_t reps = 200;         // simulation runs per cell
  std::uint64_t seed = 0;
  QuantileLevels levels = QuantileLevels::percentiles();

  void validate() const {
    if (phi_values.empty() || mu_values.empty()) fail(errc::invalid_spec, "empty grid");
    for (const double phi : phi_values) {
      if (!(std::fabs(phi) < 1.0)) fail(errc::invalid_spec, "grid phi outside (-1, 1)");
    }
    if (reps < 1) fail(errc::invalid_spec, "need reps >= 1");
    if (n < 1) fail(errc::invalid_spec, "need n >= 1");
  }
};

struct RejectionCell {
  double phi = 0.0;
  double mu = 0.0;
  std::size_t n = 0;
  double delta = 0.0;
  double alpha = 0.0;
  std::size_t reps = 0;
  double reject_rate = 0.0;
  double stderror = 0.0;  // binomial standard error
};

struct RejectionSurface {
  std::vector<RejectionCell> cells;
};

// Each (cell, rep) pair runs on its own pair of derived seeds (one for the
// data, one for the test), so results do not depend on scheduling.
inline RejectionSurface rejection_grid(const GridSpec& grid, unsigned threads = 1) {
  grid.validate();
  const std::size_t cell_count = grid.phi_values.size() * grid.mu_values.size();
  std::vector<unsigned char> rejected(cell_count * grid.reps, 0);

  parallel_chunks(cell_count * grid.reps, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t job = lo; job < hi; ++job) {
      const std::size_t cell = job / grid.reps;
      const std::size_t rep = job % grid.reps;
      const double phi = grid.phi_values[cell / grid.mu_values.size()];
      const double mu = grid.mu_values[cell % grid.mu_values.size()];

      Ar1Spec data;
      data.phi = phi;
      data.sigma = 1.0;
      data.mu_shift = mu;
      data.n = grid.n;
      data.seed = derive_seed(derive_seed(grid.seed, cell), 2 * rep);

      TestConfig cfg;
      cfg.alpha = grid.alpha;
      cfg.delta = grid.delta;
      cfg.levels = grid.levels;
      cfg.replicates = grid.replicates;
      cfg.seed = derive_seed(derive_seed(grid.seed, cell), 2 * rep + 1);

      const TestResult r = run_test(gen_ar1(data), cfg, 1);
      rejected[job] = r.decision == Decision::violation ? 1 : 0;
    }
  });

  RejectionSurface surface;
  surface.cells.reserve(cell_count);
  for (std::size_t cell = 0; cell < cell_count; ++cell) {
    std::size_t hits = 0;
    for (std::size_t rep = 0; rep < grid.reps; ++rep) hits += rejected[cell * grid.reps + rep];
    RejectionCell c;
    c.phi = grid.phi_values[cell / grid.mu_values.size()];
    c.mu = grid.mu_values[cell % grid.mu_values.size()];
    c.n = grid.n;
    c.delta = grid.delta;
    c.alpha = grid.alpha;
    c.reps = grid.reps;
    c.reject_rate = static_cast<double>(hits) / static_cast<double>(grid.reps);
    c.stderror = std::sqrt(c.reject_rate * (1.0 - c.reject_rate) / static_cast<double>(grid.reps));
    surface.cells.push_back(c);
  }
  return surface;
}

}  // namespace qleak
