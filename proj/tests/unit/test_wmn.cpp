#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "epiwave/util/rng.hpp"
#include "epiwave/wmn/normalize.hpp"
#include "epiwave/wmn/series_io.hpp"
#include "epiwave/wmn/windows.hpp"

using namespace epiwave;
using namespace epiwave::wmn;

namespace {

SnapshotSeries random_series(std::uint64_t seed, std::size_t n, std::size_t words, std::size_t days) {
  Rng rng(seed);
  std::vector<std::string> ids, symptoms;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("d" + std::to_string(i));
  for (std::size_t w = 0; w < words; ++w) symptoms.push_back("s" + std::to_string(w));
  std::vector<Snapshot> snaps;
  for (std::size_t t = 0; t < days; ++t) {
    Snapshot s{static_cast<std::int64_t>(t), Matrix(n, n), Matrix(n, words), std::vector<std::int64_t>(n)};
    for (auto& v : s.trips.values()) v = static_cast<double>(rng.below(20));
    for (auto& v : s.search.values()) v = static_cast<double>(rng.below(50));
    for (auto& c : s.cases) c = static_cast<std::int64_t>(rng.below(100));
    snaps.push_back(std::move(s));
  }
  return SnapshotSeries(Date::parse_iso("2021-03-01"), ids, symptoms, std::move(snaps));
}

fs::path scratch_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("epiwave_wmn_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(NormalizeAdjacency, NoTripsGivesIdentity) {
  EXPECT_EQ(max_abs_diff(normalize_adjacency(Matrix(3, 3)), Matrix::identity(3)), 0.0);
}

TEST(NormalizeAdjacency, HandExample) {
  const Matrix e = normalize_adjacency(Matrix{{0, 2}, {1, 0}});
  EXPECT_LT(max_abs_diff(e, Matrix{{0.5, 2.0 / 3.0}, {0.5, 1.0 / 3.0}}), 1e-15);
}

TEST(NormalizeAdjacency, ColumnsSumToOne) {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    Matrix m(n, n);
    for (auto& v : m.values()) v = rng.bernoulli(0.3) ? 0.0 : rng.uniform(0, 500);
    const Matrix e = normalize_adjacency(m);
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0;
      for (std::size_t i = 0; i < n; ++i) {
        EXPECT_GE(e(i, j), 0.0);
        s += e(i, j);
      }
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
  }
}

TEST(NormalizeAdjacency, SymmetricForm) {
  // E + I = [[1,2],[2,1]], degrees 3 and 3
  const Matrix e = normalize_adjacency(Matrix{{0, 2}, {2, 0}}, AdjacencyNorm::symmetric);
  EXPECT_LT(max_abs_diff(e, Matrix{{1.0 / 3, 2.0 / 3}, {2.0 / 3, 1.0 / 3}}), 1e-15);
  EXPECT_EQ(parse_adjacency_norm("symmetric"), AdjacencyNorm::symmetric);
  EXPECT_THROW(parse_adjacency_norm("rows"), std::invalid_argument);
}

TEST(NormalizeAdjacency, NegativeEntryRejected) {
  EXPECT_THROW(normalize_adjacency(Matrix{{0, -1}, {0, 0}}), ValidationError);
}

TEST(NormalizeSearch, EndpointsConstantsAndClipping) {
  NormalizationStats s{Matrix{{0, 4}}, Matrix{{10, 4}}, {0}, {50}};
  EXPECT_EQ(s.search_value(0, 0, 10), 1.0);
  EXPECT_EQ(s.search_value(0, 0, 0), 0.0);
  EXPECT_EQ(s.search_value(0, 1, 4), 0.0);
  EXPECT_EQ(s.search_value(0, 1, 9), 0.0);
  EXPECT_EQ(s.search_value(0, 0, 25), 1.0);
  EXPECT_EQ(s.search_value(0, 0, -3), 0.0);
}

TEST(NormalizeSearch, DayAboveTrainingMaxClips) {
  auto series = random_series(2, 3, 2, 20);
  const std::vector<std::int64_t> fit{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto stats = NormalizationStats::fit(series, fit);
  auto& late = series.mutable_day(15);
  late.search(1, 0) = stats.search_max(1, 0) + 100;
  EXPECT_EQ(normalize_search(series, stats)[15](1, 0), 1.0);
}

TEST(NormalizeCases, ArithmeticAndRoundTrip) {
  NormalizationStats s{Matrix(2, 1), Matrix(2, 1), {0, 7}, {50, 7}};
  EXPECT_DOUBLE_EQ(s.case_value(0, 25), 0.5);
  EXPECT_EQ(s.case_value(1, 7), 0.0);
  EXPECT_EQ(s.case_count(1, 0.0), 7.0);
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> x{rng.uniform(0, 50), 7};
    const auto back = denormalize_cases(normalize_cases(x, s), s);
    EXPECT_LT(std::abs(back[0] - x[0]), 1e-12);
    EXPECT_EQ(back[1], 7.0);
  }
}

TEST(NormalizationStats, FitUsesOnlyGivenDays) {
  auto series = random_series(3, 4, 3, 30);
  std::vector<std::int64_t> train;
  for (std::int64_t t = 0; t < 20; ++t) train.push_back(t);
  const auto a = NormalizationStats::fit(series, train);
  series.mutable_day(25).cases[2] = 100000;
  series.mutable_day(25).search(1, 1) = 100000;
  EXPECT_EQ(NormalizationStats::fit(series, train), a);
  std::vector<std::int64_t> all = train;
  for (std::int64_t t = 20; t < 30; ++t) all.push_back(t);
  EXPECT_NE(NormalizationStats::fit(series, all), a);
}

TEST(BuildWindows, CountingExamples) {
  const auto w = build_windows(30, 21, 7);
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w.front().anchor, 20);
  EXPECT_EQ(w.back().anchor, 22);
  EXPECT_EQ(build_windows(28, 21, 7).size(), 1u);
  EXPECT_THROW(build_windows(27, 21, 7), std::invalid_argument);
}

TEST(BuildWindows, InputAndTargetDaysDisjointAndConsecutive) {
  for (const auto& w : build_windows(60, 14, 5)) {
    EXPECT_EQ(w.last_input() - w.first_input() + 1, 14);
    EXPECT_EQ(w.last_target() - w.first_target() + 1, 5);
    EXPECT_EQ(w.first_target(), w.last_input() + 1);
  }
}

TEST(Series, GapsAndBadShapesRejected) {
  auto ok = random_series(5, 2, 2, 3);
  auto days = ok.days();
  days[2].day = 3;
  EXPECT_THROW(SnapshotSeries(ok.origin(), ok.districts(), ok.symptoms(), days), ValidationError);
  days = ok.days();
  days[1].trips = Matrix(3, 3);
  EXPECT_THROW(SnapshotSeries(ok.origin(), ok.districts(), ok.symptoms(), days), ValidationError);
  days = ok.days();
  days[1].cases[0] = -1;
  EXPECT_THROW(SnapshotSeries(ok.origin(), ok.districts(), ok.symptoms(), days), ValidationError);
}

TEST(SeriesIo, RoundTrip) {
  const auto series = random_series(6, 3, 4, 5);
  const auto dir = scratch_dir("roundtrip");
  write_series(series, dir);
  EXPECT_TRUE(fs::exists(dir / "trips_2021-03-01.csv"));
  EXPECT_TRUE(fs::exists(dir / "search_2021-03-05.csv"));
  EXPECT_TRUE(fs::exists(dir / "cases_2021-03-03.csv"));
  const auto back = read_series(dir);
  ASSERT_EQ(back.size(), series.size());
  EXPECT_EQ(back.origin(), series.origin());
  EXPECT_EQ(back.districts(), series.districts());
  EXPECT_EQ(back.symptoms(), series.symptoms());
  for (std::size_t t = 0; t < series.size(); ++t) {
    EXPECT_EQ(max_abs_diff(back[t].trips, series[t].trips), 0.0);
    EXPECT_EQ(max_abs_diff(back[t].search, series[t].search), 0.0);
    EXPECT_EQ(back[t].cases, series[t].cases);
  }
  fs::remove_all(dir);
}

TEST(SeriesIo, MissingDayIsReported) {
  const auto series = random_series(7, 2, 2, 4);
  const auto dir = scratch_dir("gap");
  write_series(series, dir);
  fs::remove(dir / "cases_2021-03-02.csv");
  try {
    read_series(dir);
    FAIL() << "expected an error for the missing day";
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("2021-03-02"), std::string::npos) << e.what();
  }
  fs::remove_all(dir);
}
