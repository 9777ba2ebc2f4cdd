#pragma once

// Umbrella header for the qleak library: quantile-based two-sample testing
// of timing measurements against a negligibility threshold, with block
// bootstrap calibration for dependent data, sample-size estimation, and a
// synthetic-data simulation harness.

#include "qleak/bootstrap.hpp"
#include "qleak/dependence.hpp"
#include "qleak/detector.hpp"
#include "qleak/error.hpp"
#include "qleak/numeric.hpp"
#include "qleak/parallel.hpp"
#include "qleak/power.hpp"
#include "qleak/quantiles.hpp"
#include "qleak/report.hpp"
#include "qleak/rng.hpp"
#include "qleak/series.hpp"
#include "qleak/simulate.hpp"
