#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qleak/error.hpp"

namespace qleak {

enum class Unit { nanoseconds, cycles, unitless };

inline std::string_view unit_name(Unit u) {
  switch (u) {
    case Unit::nanoseconds:
      return "ns";
    case Unit::cycles:
      return "cycles";
    default:
      return "unitless";
  }
}

inline std::optional<Unit> parse_unit(std::string_view s) {
  if (s == "ns") return Unit::nanoseconds;
  if (s == "cycles") return Unit::cycles;
  if (s == "unitless") return Unit::unitless;
  return std::nullopt;
}

// One ordered run of timing observations. Order is significant: it carries
// the serial dependence structure that block resampling preserves.
struct MeasurementSeries {
  std::vector<double> values;
  std::string label;
  Unit unit = Unit::unitless;

  std::size_t size() const noexcept { return values.size(); }
};

// Aligned two-class sample; index i pairs x.values[i] with y.values[i].
struct PairedSample {
  MeasurementSeries x;
  MeasurementSeries y;

  std::size_t n() const noexcept { return x.values.size(); }
};

enum class DataKind { continuous, discrete };

inline std::string_view data_kind_name(DataKind k) {
  return k == DataKind::continuous ? "continuous" : "discrete";
}

struct DataKindInfo {
  DataKind kind = DataKind::continuous;
  std::size_t distinct_count = 0;  // pooled over both series
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto issp = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; };
  while (!s.empty() && issp(s.front())) s.remove_prefix(1);
  while (!s.empty() && issp(s.back())) s.remove_suffix(1);
  return s;
}

// Integer or decimal literal with optional exponent and sign. Rejects
// partial parses ("1.5x"), hex, inf and nan.
inline std::optional<double> parse_value(std::string_view token) {
  if (token.empty()) return std::nullopt;
  std::string_view body = token;
  if (body.front() == '+') body.remove_prefix(1);  // from_chars takes only '-'
  if (body.empty()) return std::nullopt;
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), out);
  if (ec != std::errc{} || ptr != body.data() + body.size()) return std::nullopt;
  if (!std::isfinite(out)) return std::nullopt;
  return out;
}

}  // namespace detail

// Text format: one value per line, '#' starts a comment line, blank lines
// are skipped. Values are kept in file order.
inline MeasurementSeries load_series(const std::filesystem::path& path, Unit unit,
                                     std::string label = "") {
  std::ifstream in(path);
  if (!in) fail(errc::io, "cannot open '" + path.string() + "' for reading");
  MeasurementSeries series;
  series.unit = unit;
  series.label = label.empty() ? path.filename().string() : std::move(label);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view token = detail::trim(line);
    if (token.empty() || token.front() == '#') continue;
    const auto value = detail::parse_value(token);
    if (!value) {
      fail(errc::parse, path.string() + ": line " + std::to_string(line_no) +
                            ": not a finite numeric literal: '" + std::string(token) + "'");
    }
    series.values.push_back(*value);
  }
  if (in.bad()) fail(errc::io, "read error on '" + path.string() + "'");
  if (series.values.empty()) fail(errc::empty_input, path.string() + ": no numeric lines");
  return series;
}

// 17 significant digits, enough for double round trips through load_series.
inline void write_series(const std::filesystem::path& path, const MeasurementSeries& series) {
  std::ofstream out(path);
  if (!out) fail(errc::io, "cannot open '" + path.string() + "' for writing");
  char buf[40];
  for (const double v : series.values) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v);
    out << buf;
  }
  out.flush();
  if (!out) fail(errc::io, "write error on '" + path.string() + "'");
}

// Aligns two series into a paired sample. Unequal lengths are an error
// unless truncate is set, in which case both are cut to the common prefix.
inline PairedSample pair(MeasurementSeries x, MeasurementSeries y, bool truncate = false) {
  if (x.values.empty() || y.values.empty()) fail(errc::empty_input, "cannot pair empty series");
  if (x.unit != y.unit) {
    fail(errc::unit_mismatch, std::string("unit mismatch: '") + std::string(unit_name(x.unit)) +
                                  "' vs '" + std::string(unit_name(y.unit)) + "'");
  }
  if (x.values.size() != y.values.size()) {
    if (!truncate) {
      fail(errc::length_mismatch,
           "length mismatch: " + std::to_string(x.values.size()) + " vs " +
               std::to_string(y.values.size()) + " (pass truncate to cut to the shorter)");
    }
    const std::size_t n = std::min(x.values.size(), y.values.size());
    x.values.resize(n);
    y.values.resize(n);
  }
  return PairedSample{std::move(x), std::move(y)};
}

// Discrete iff the pooled distinct-value count is at most
// max(16, floor(0.05 * 2n)). Cycle counters repeat values heavily;
// continuous clocks almost never do. Overridable from the CLI.
inline DataKindInfo classify_data_kind(const PairedSample& sample) {
  std::vector<double> pooled;
  pooled.reserve(2 * sample.n());
  pooled.insert(pooled.end(), sample.x.values.begin(), sample.x.values.end());
  pooled.insert(pooled.end(), sample.y.values.begin(), sample.y.values.end());
  std::sort(pooled.begin(), pooled.end());
  const std::size_t distinct =
      static_cast<std::size_t>(std::unique(pooled.begin(), pooled.end()) - pooled.begin());
  const std::size_t cutoff = std::max<std::size_t>(16, (2 * sample.n()) / 20);
  DataKindInfo info;
  info.distinct_count = distinct;
  info.kind = distinct <= cutoff ? DataKind::discrete : DataKind::continuous;
  return info;
}

}  // namespace qleak
