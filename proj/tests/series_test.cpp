#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "qleak/series.hpp"

namespace fs = std::filesystem;
using namespace qleak;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("qleak_series_" + std::to_string(::getpid()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  fs::path file(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

fs::path write_file(const TempDir& dir, const std::string& name, const std::string& body) {
  const fs::path p = dir.file(name);
  std::ofstream out(p);
  out << body;
  return p;
}

MeasurementSeries series_of(std::vector<double> values, Unit unit = Unit::unitless) {
  MeasurementSeries s;
  s.values = std::move(values);
  s.unit = unit;
  return s;
}

}  // namespace

// ===========================================================================
// load_series
// ===========================================================================

TEST(LoadSeries, ParsesPlainValuesInOrder) {
  TempDir dir;
  const auto p = write_file(dir, "a.txt", "1\n2\n3\n");
  const MeasurementSeries s = load_series(p, Unit::nanoseconds);
  EXPECT_EQ(s.values, (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(s.unit, Unit::nanoseconds);
}

TEST(LoadSeries, SkipsCommentsAndBlankLines) {
  TempDir dir;
  const auto p = write_file(dir, "a.txt", "# hdr\n5\n\n7\n");
  EXPECT_EQ(load_series(p, Unit::unitless).values, (std::vector<double>{5, 7}));
}

TEST(LoadSeries, ReportsParseErrorWithLineNumber) {
  TempDir dir;
  const auto p = write_file(dir, "a.txt", "5\nabc\n");
  try {
    load_series(p, Unit::unitless);
    FAIL() << "expected parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::parse);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(LoadSeries, AcceptsIntegerDecimalAndExponentLiterals) {
  TempDir dir;
  const auto p = write_file(dir, "a.txt", "42\n-7.25\n+4\n1e3\n2.5E-2\n  9 \n");
  EXPECT_EQ(load_series(p, Unit::unitless).values,
            (std::vector<double>{42, -7.25, 4, 1000, 0.025, 9}));
}

TEST(LoadSeries, RejectsNonFiniteLiterals) {
  TempDir dir;
  EXPECT_THROW(load_series(write_file(dir, "a.txt", "inf\n"), Unit::unitless), Error);
  EXPECT_THROW(load_series(write_file(dir, "b.txt", "nan\n"), Unit::unitless), Error);
  EXPECT_THROW(load_series(write_file(dir, "c.txt", "1e999\n"), Unit::unitless), Error);
}

TEST(LoadSeries, RejectsTrailingJunk) {
  TempDir dir;
  EXPECT_THROW(load_series(write_file(dir, "a.txt", "1.5x\n"), Unit::unitless), Error);
}

TEST(LoadSeries, EmptyInput) {
  TempDir dir;
  try {
    load_series(write_file(dir, "a.txt", "# only comments\n\n"), Unit::unitless);
    FAIL() << "expected empty_input";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::empty_input);
  }
}

TEST(LoadSeries, MissingFileIsIoError) {
  try {
    load_series("/nonexistent/definitely/missing.txt", Unit::unitless);
    FAIL() << "expected io error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::io);
    EXPECT_TRUE(e.is_data_error());
  }
}

TEST(WriteSeries, RoundTripsBitExact) {
  TempDir dir;
  std::mt19937_64 rng(20240811);
  MeasurementSeries s = series_of({});
  for (int i = 0; i < 300; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const int mag = static_cast<int>(rng() % 61) - 30;
    s.values.push_back((u - 0.5) * std::pow(10.0, mag));
  }
  s.values.push_back(0.0);
  s.values.push_back(-123456789.000000123);
  const auto p = dir.file("round.txt");
  write_series(p, s);
  const MeasurementSeries back = load_series(p, Unit::unitless);
  ASSERT_EQ(back.values.size(), s.values.size());
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    EXPECT_EQ(back.values[i], s.values[i]) << "index " << i;
  }
}

// ===========================================================================
// pair
// ===========================================================================

TEST(Pair, EqualLengths) {
  const PairedSample p = pair(series_of(std::vector<double>(100, 1.0)),
                              series_of(std::vector<double>(100, 2.0)));
  EXPECT_EQ(p.n(), 100u);
}

TEST(Pair, TruncatesToCommonPrefix) {
  std::vector<double> x(100), y(90);
  for (int i = 0; i < 100; ++i) x[i] = i;
  for (int i = 0; i < 90; ++i) y[i] = -i;
  const PairedSample p = pair(series_of(x), series_of(y), /*truncate=*/true);
  EXPECT_EQ(p.n(), 90u);
  EXPECT_EQ(p.x.values[89], 89.0);
  EXPECT_EQ(p.y.values[89], -89.0);
}

TEST(Pair, LengthMismatchWithoutTruncate) {
  try {
    pair(series_of(std::vector<double>(100, 0.0)), series_of(std::vector<double>(90, 0.0)));
    FAIL() << "expected length_mismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::length_mismatch);
  }
}

TEST(Pair, UnitMismatch) {
  try {
    pair(series_of({1, 2}, Unit::nanoseconds), series_of({1, 2}, Unit::cycles));
    FAIL() << "expected unit_mismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::unit_mismatch);
  }
}

// ===========================================================================
// classify_data_kind
// ===========================================================================

TEST(Classify, FewDistinctValuesIsDiscrete) {
  // Cycle-counter style data: 12 distinct values across 2*10000 samples.
  std::vector<double> x(10000), y(10000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = 100.0 + static_cast<double>(i % 12);
    y[i] = 100.0 + static_cast<double>((i * 7) % 12);
  }
  const DataKindInfo info = classify_data_kind(pair(series_of(x), series_of(y)));
  EXPECT_EQ(info.kind, DataKind::discrete);
  EXPECT_EQ(info.distinct_count, 12u);
}

TEST(Classify, AllDistinctIsContinuous) {
  std::vector<double> x(10000), y(10000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = static_cast<double>(i) + 0.25;
    y[i] = static_cast<double>(i) + 10000.5;
  }
  const DataKindInfo info = classify_data_kind(pair(series_of(x), series_of(y)));
  EXPECT_EQ(info.kind, DataKind::continuous);
  EXPECT_EQ(info.distinct_count, 20000u);
}

TEST(Classify, ThirtyDistinctAtN100IsContinuous) {
  // Rule: discrete iff distinct <= max(16, floor(0.05 * 2n)) = max(16, 10).
  std::vector<double> x(100), y(100);
  for (std::size_t i = 0; i < 100; ++i) {
    x[i] = static_cast<double>(i % 30);
    y[i] = static_cast<double>((i + 3) % 30);
  }
  const DataKindInfo info = classify_data_kind(pair(series_of(x), series_of(y)));
  EXPECT_EQ(info.distinct_count, 30u);
  EXPECT_EQ(info.kind, DataKind::continuous);
}

TEST(Classify, BoundaryAtSixteenDistinct) {
  const auto fill = [](std::size_t mod) {
    std::vector<double> v(100);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i % mod);
    return v;
  };
  EXPECT_EQ(classify_data_kind(pair(series_of(fill(16)), series_of(fill(16)))).kind,
            DataKind::discrete);
  EXPECT_EQ(classify_data_kind(pair(series_of(fill(17)), series_of(fill(17)))).kind,
            DataKind::continuous);
}

TEST(Classify, PermutationInvariantAndDeterministic) {
  std::mt19937_64 rng(99);
  std::vector<double> x(500), y(500);
  for (auto& v : x) v = static_cast<double>(rng() % 40);
  for (auto& v : y) v = static_cast<double>(rng() % 40);
  const DataKindInfo base = classify_data_kind(pair(series_of(x), series_of(y)));
  for (int round = 0; round < 20; ++round) {
    std::shuffle(x.begin(), x.end(), rng);
    std::shuffle(y.begin(), y.end(), rng);
    const DataKindInfo again = classify_data_kind(pair(series_of(x), series_of(y)));
    EXPECT_EQ(again.kind, base.kind);
    EXPECT_EQ(again.distinct_count, base.distinct_count);
  }
}
