#include <gtest/gtest.h>

#include "epiwave/preprocess/pipeline.hpp"
#include "epiwave/util/rng.hpp"

using namespace epiwave;
using namespace epiwave::preprocess;

namespace {

// Three side-by-side unit boxes: A = lon [0,1), B = [1,2), C = [2,3).
const RectDistrictMap& strip() {
  static const RectDistrictMap m({{"A", {0, 0, 1, 1}}, {"B", {0, 1, 1, 2}}, {"C", {0, 2, 1, 3}}});
  return m;
}
constexpr std::size_t A = 0, B = 1, C = 2;

const LocalClock kClock{};
const Date kDay = Date::parse_iso("2021-01-10");

std::int64_t at(Date d, int h, int m) { return kClock.midnight(d) + h * 3600 + m * 60; }

TimedPoint in(std::size_t district, std::int64_t t) { return {0.5, 0.5 + static_cast<double>(district), t}; }

std::vector<Stay> stays_of(const std::vector<TimedPoint>& track) { return extract_stays(track, strip()); }

Matrix trips_of(const std::vector<TimedPoint>& track, Date d) {
  const std::vector<std::vector<Stay>> users{stays_of(track)};
  return count_trips(users, d, 3);
}

}  // namespace

TEST(Stays, AllDayInOneDistrict) {
  const auto s = stays_of({in(A, at(kDay, 8, 0)), in(A, at(kDay, 12, 0)), in(A, at(kDay, 20, 0))});
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0], (Stay{A, at(kDay, 8, 0), at(kDay, 20, 0), kDay}));
  EXPECT_EQ(trips_of({in(A, at(kDay, 8, 0)), in(A, at(kDay, 20, 0))}, kDay).sum(), 0.0);
}

TEST(Stays, FiveMinuteVisitDropped) {
  const std::vector<TimedPoint> track{in(A, at(kDay, 8, 0)),  in(A, at(kDay, 10, 0)), in(B, at(kDay, 10, 1)),
                                      in(B, at(kDay, 10, 6)), in(A, at(kDay, 10, 7)), in(A, at(kDay, 12, 7))};
  const auto s = stays_of(track);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].district, A);
  EXPECT_EQ(s[1].district, A);
  EXPECT_EQ(trips_of(track, kDay).sum(), 0.0);
}

TEST(Stays, ThreeDistrictsThreeStays) {
  const std::vector<TimedPoint> track{in(A, at(kDay, 8, 0)),  in(A, at(kDay, 9, 0)),  in(B, at(kDay, 9, 10)),
                                      in(B, at(kDay, 9, 40)), in(C, at(kDay, 9, 50)), in(C, at(kDay, 10, 50))};
  const auto s = stays_of(track);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].district, A);
  EXPECT_EQ(s[1].district, B);
  EXPECT_EQ(s[2].district, C);
  Matrix expected(3, 3);
  expected(A, B) = 1;
  expected(B, C) = 1;
  EXPECT_EQ(max_abs_diff(trips_of(track, kDay), expected), 0.0);
}

TEST(Stays, ExactlyMinimumStayIsKept) {
  const auto s = stays_of({in(A, at(kDay, 8, 0)), in(A, at(kDay, 8, 10)), in(B, at(kDay, 8, 11)),
                           in(B, at(kDay, 8, 20))});
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].district, A);
}

TEST(Trips, ThereAndBack) {
  const std::vector<TimedPoint> track{in(A, at(kDay, 7, 0)),  in(A, at(kDay, 8, 0)),  in(B, at(kDay, 8, 30)),
                                      in(B, at(kDay, 17, 0)), in(A, at(kDay, 17, 30)), in(A, at(kDay, 23, 0))};
  Matrix expected(3, 3);
  expected(A, B) = 1;
  expected(B, A) = 1;
  EXPECT_EQ(max_abs_diff(trips_of(track, kDay), expected), 0.0);
}

TEST(Trips, MidnightSpanningStaySplitPerDay) {
  const Date next = kDay + 1;
  const std::vector<TimedPoint> track{in(B, at(kDay, 21, 0)), in(B, at(kDay, 22, 0)), in(A, at(kDay, 23, 0)),
                                      in(A, at(next, 1, 0)),  in(B, at(next, 1, 30)), in(B, at(next, 3, 0))};
  const auto s = stays_of(track);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s[1], (Stay{A, at(kDay, 23, 0), at(next, 0, 0), kDay}));
  EXPECT_EQ(s[2], (Stay{A, at(next, 0, 0), at(next, 1, 0), next}));
  Matrix day1(3, 3), day2(3, 3);
  day1(B, A) = 1;
  day2(A, B) = 1;
  EXPECT_EQ(max_abs_diff(trips_of(track, kDay), day1), 0.0);
  EXPECT_EQ(max_abs_diff(trips_of(track, next), day2), 0.0);
}

TEST(Trips, ShortPieceBeforeMidnightDropped) {
  const Date next = kDay + 1;
  const std::vector<TimedPoint> track{in(C, at(kDay, 23, 55)), in(C, at(next, 0, 30)), in(A, at(next, 0, 40)),
                                      in(A, at(next, 2, 0))};
  const auto s = stays_of(track);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0], (Stay{C, at(next, 0, 0), at(next, 0, 30), next}));
  Matrix day2(3, 3);
  day2(C, A) = 1;
  EXPECT_EQ(max_abs_diff(trips_of(track, next), day2), 0.0);
  EXPECT_EQ(trips_of(track, kDay).sum(), 0.0);
}

TEST(Trips, OutsideEveryDistrictIgnored) {
  const std::vector<TimedPoint> track{in(A, at(kDay, 8, 0)), in(A, at(kDay, 9, 0)), {5.0, 5.0, at(kDay, 9, 5)},
                                      in(A, at(kDay, 9, 20)), in(B, at(kDay, 9, 30)), in(B, at(kDay, 10, 0))};
  const auto s = stays_of(track);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].leave, at(kDay, 9, 20));
}

TEST(Stays, PropertiesOnRandomTracks) {
  Rng rng(9);
  for (int user = 0; user < 200; ++user) {
    std::vector<TimedPoint> track;
    std::int64_t t = at(kDay, 0, 0) + static_cast<std::int64_t>(rng.below(3600));
    for (int k = 0; k < 60; ++k) {
      track.push_back(in(rng.below(3), t));
      t += 60 + static_cast<std::int64_t>(rng.below(3600));
    }
    const auto s = stays_of(track);
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_GE(s[i].duration(), 600);
      if (i > 0) {
        EXPECT_GE(s[i].enter, s[i - 1].leave);
      }
    }
    // conservation: every consecutive distinct same-day pair is one trip
    double pairs = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
      if (s[i].day == s[i - 1].day && s[i].district != s[i - 1].district) ++pairs;
    double total = 0;
    for (Date d = kDay; d <= kDay + 3; d = d + 1) total += trips_of(track, d).sum();
    EXPECT_EQ(total, pairs);
  }
}

TEST(Stays, UnsortedInputRejected) {
  EXPECT_THROW(stays_of({in(A, at(kDay, 9, 0)), in(A, at(kDay, 8, 0))}), std::invalid_argument);
}

TEST(MeanShift, FixedPointAndSinglePing) {
  const std::vector<GeoPoint> same(10, GeoPoint{35.1, 139.2});
  const auto m = mean_shift_mode(same);
  EXPECT_DOUBLE_EQ(m.lat, 35.1);
  EXPECT_DOUBLE_EQ(m.lon, 139.2);
  const std::vector<GeoPoint> one{{35.3, 139.4}};
  EXPECT_DOUBLE_EQ(mean_shift_mode(one).lat, 35.3);
  EXPECT_FALSE(estimate_home({}, 0.005).has_value());
}

TEST(MeanShift, DominantBlobWins) {
  Rng rng(21);
  int hits = 0;
  for (int user = 0; user < 100; ++user) {
    const GeoPoint home{35.6 + rng.uniform(-0.1, 0.1), 139.7 + rng.uniform(-0.1, 0.1)};
    const GeoPoint work{home.lat + 0.02, home.lon - 0.015};
    std::vector<GeoPoint> pts;
    for (int k = 0; k < 100; ++k) {
      const GeoPoint c = k % 5 == 4 ? work : home;
      pts.push_back({rng.normal(c.lat, 0.001), rng.normal(c.lon, 0.001)});
    }
    if (planar_distance(mean_shift_mode(pts, {0.005}), home) <= 1e-3) ++hits;
  }
  EXPECT_GE(hits, 95);
}

TEST(MeanShift, TieGoesToEarliestPing) {
  const std::vector<GeoPoint> pts{{1.0, 1.0}, {2.0, 2.0}};
  EXPECT_DOUBLE_EQ(mean_shift_mode(pts, {0.005}).lat, 1.0);
}

TEST(PermanentUsers, ThresholdInclusiveAndPlantedSplit) {
  PreprocessOptions opt;
  opt.min_night_records = 20;
  const Date last = kDay + 25;
  std::vector<MobilityPing> pings;
  for (std::uint32_t u = 0; u < 100; ++u) {
    const int n = u < 10 ? 19 : (u < 20 ? 20 : 30);  // first ten are transient
    for (int k = 0; k < n; ++k) pings.push_back({u, 0.5, 0.5, at(kDay + k % 26, 22, k % 60)});
    // daytime pings never count
    for (int k = 0; k < 10; ++k) pings.push_back({u, 0.5, 0.5, at(kDay + k, 12, 0)});
  }
  const auto keep = filter_permanent_users(pings, kDay, last, opt);
  EXPECT_EQ(keep.size(), 90u);
  EXPECT_FALSE(keep.count(0));
  EXPECT_TRUE(keep.count(10));
}

TEST(SymptomQueries, LexiconMatching) {
  const SymptomLexicon lex;
  const auto names = lex.names();
  auto idx = [&](const std::string& s) {
    return static_cast<std::size_t>(std::find(names.begin(), names.end(), s) - names.begin());
  };
  EXPECT_EQ(lex.match("bad cough tonight"), std::vector<std::size_t>{idx("Cough")});
  EXPECT_TRUE(lex.match("weather tomorrow").empty());
  auto both = lex.match("Fever and COUGH");
  std::sort(both.begin(), both.end());
  std::vector<std::size_t> expected{idx("Cough"), idx("Pyrexia")};
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(both, expected);
}

TEST(SymptomQueries, CountedByHomeDistrictAndSkippedWithoutHome) {
  const SymptomLexicon lex = SymptomLexicon().subset({"Cough", "Pyrexia"});
  HomeAssignment homes{{1, HomeLocation{{0.5, 1.5}, B}}};
  PreprocessStats stats;
  SymptomCounter counter(lex, 3, kDay, kDay + 1);
  counter.add(1, homes, kDay, "fever and cough", stats);
  counter.add(1, homes, kDay, "cough again", stats);
  counter.add(1, homes, kDay + 1, "weather tomorrow", stats);
  counter.add(2, homes, kDay, "cough", stats);
  counter.add(1, homes, kDay + 5, "cough", stats);
  auto days = counter.take();
  ASSERT_EQ(days.size(), 2u);
  EXPECT_EQ(max_abs_diff(days.at(kDay), Matrix{{0, 0}, {2, 1}, {0, 0}}), 0.0);
  EXPECT_EQ(days.at(kDay + 1).sum(), 0.0);
  EXPECT_EQ(stats.search_skipped_no_home, 1u);
  EXPECT_EQ(stats.search_outside_range, 1u);
}

TEST(AssembleSeries, CompleteAndMissingDay) {
  std::map<Date, Matrix> trips, search;
  std::map<Date, std::vector<std::int64_t>> cases;
  for (int k = 0; k < 10; ++k) {
    trips[kDay + k] = Matrix(3, 3);
    search[kDay + k] = Matrix(3, 2);
    cases[kDay + k] = {1, 2, 3};
  }
  const std::vector<std::string> ids{"A", "B", "C"}, words{"Cough", "Pyrexia"};
  EXPECT_EQ(assemble_series(trips, search, cases, kDay, kDay + 9, ids, words).size(), 10u);
  trips.erase(kDay + 4);
  try {
    assemble_series(trips, search, cases, kDay, kDay + 9, ids, words);
    FAIL() << "expected an error for the missing trips day";
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find((kDay + 4).iso()), std::string::npos) << e.what();
  }
}
