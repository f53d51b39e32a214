#pragma once

// Raw mobility pings and web search logs to a snapshot series:
//   1. permanent users and their homes (mean shift over night pings)
//   2-3. daily stays per user and the inter-district trip matrix
//   4-5. symptom queries per user, aggregated by home district

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "epiwave/preprocess/district_map.hpp"
#include "epiwave/preprocess/mean_shift.hpp"
#include "epiwave/preprocess/records.hpp"
#include "epiwave/preprocess/stays.hpp"
#include "epiwave/preprocess/symptoms.hpp"
#include "epiwave/wmn/series_io.hpp"
#include "epiwave/wmn/snapshot.hpp"

namespace epiwave::preprocess {

struct PreprocessOptions {
  int min_stay_minutes = 10;
  double bandwidth = 0.005;
  std::size_t min_night_records = 20;
  int home_window_days = 26;
  int night_start_hour = 18;  ///< night runs from this hour ...
  int night_end_hour = 9;     ///< ... to this hour the next morning
  LocalClock clock;
};

struct HomeLocation {
  GeoPoint point;
  std::size_t district = 0;
};

/// user index -> home, for permanent users only.
using HomeAssignment = std::unordered_map<std::uint32_t, HomeLocation>;

struct PreprocessStats {
  std::size_t users_seen = 0;
  std::size_t permanent_users = 0;
  std::size_t homes_outside_districts = 0;
  std::size_t users_without_night_pings = 0;
  std::size_t search_records = 0;
  std::size_t search_skipped_no_home = 0;
  std::size_t search_outside_range = 0;
};

inline bool is_night(std::int64_t unix_time, const PreprocessOptions& opt) {
  const std::int64_t h = opt.clock.seconds_of_day(unix_time) / 3600;
  return h >= opt.night_start_hour || h < opt.night_end_hour;
}

/// Users with at least `min_night_records` night pings on days
/// [window.first, window.last]. `pings` must be grouped by user.
inline std::set<std::uint32_t> filter_permanent_users(std::span<const MobilityPing> pings,
                                                      Date window_first, Date window_last,
                                                      const PreprocessOptions& opt) {
  std::unordered_map<std::uint32_t, std::size_t> night;
  for (const auto& p : pings) {
    const Date d = opt.clock.local_date(p.time);
    if (d < window_first || d > window_last || !is_night(p.time, opt)) continue;
    ++night[p.user];
  }
  std::set<std::uint32_t> keep;
  for (const auto& [user, count] : night)
    if (count >= opt.min_night_records) keep.insert(user);
  return keep;
}

/// Home of one user from their night pings (time order). Empty when the
/// user has none.
inline std::optional<GeoPoint> estimate_home(std::span<const GeoPoint> night_pings, double bandwidth) {
  if (night_pings.empty()) return std::nullopt;
  return mean_shift_mode(night_pings, MeanShiftOptions{bandwidth});
}

/// Per-day symptom query counts by home district. Records of users without
/// a home are skipped and counted.
class SymptomCounter {
 public:
  SymptomCounter(const SymptomLexicon& lexicon, std::size_t n_districts, Date first, Date last)
      : lexicon_(lexicon), n_(n_districts), first_(first), last_(last) {}

  void add(std::uint32_t user, const HomeAssignment& homes, Date day, std::string_view query,
           PreprocessStats& stats) {
    ++stats.search_records;
    if (day < first_ || day > last_) {
      ++stats.search_outside_range;
      return;
    }
    covered_.insert(day);
    auto home = homes.find(user);
    if (home == homes.end()) {
      ++stats.search_skipped_no_home;
      return;
    }
    const auto hits = lexicon_.match(query);
    if (hits.empty()) return;
    Matrix& m = day_matrix(day);
    for (auto w : hits) m(home->second.district, w) += 1.0;
  }

  /// Days with at least one record in range, and their matrices.
  std::map<Date, Matrix> take() {
    std::map<Date, Matrix> out;
    for (Date d : covered_) out.emplace(d, day_matrix(d));
    return out;
  }

 private:
  Matrix& day_matrix(Date d) {
    auto it = counts_.find(d);
    if (it == counts_.end()) it = counts_.emplace(d, Matrix(n_, lexicon_.size())).first;
    return it->second;
  }

  const SymptomLexicon& lexicon_;
  std::size_t n_;
  Date first_, last_;
  std::set<Date> covered_;
  std::map<Date, Matrix> counts_;
};

/// Joins per-day trip and search matrices with the case table. Every day in
/// [first, last] must be present in all three sources.
inline wmn::SnapshotSeries assemble_series(const std::map<Date, Matrix>& trips,
                                           const std::map<Date, Matrix>& search,
                                           const std::map<Date, std::vector<std::int64_t>>& cases,
                                           Date first, Date last,
                                           std::vector<std::string> districts,
                                           std::vector<std::string> symptoms) {
  std::vector<std::string> problems;
  for (Date d = first; d <= last; d = d + 1) {
    if (!trips.count(d)) problems.push_back("no mobility data on " + d.iso());
    if (!search.count(d)) problems.push_back("no search data on " + d.iso());
    if (!cases.count(d)) problems.push_back("no case counts on " + d.iso());
  }
  if (!problems.empty()) {
    std::string msg = "assemble_series: calendars misaligned:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw wmn::ValidationError(msg);
  }
  std::vector<wmn::Snapshot> days;
  for (Date d = first; d <= last; d = d + 1) {
    wmn::Snapshot s;
    s.day = d - first;
    s.trips = trips.at(d);
    s.search = search.at(d);
    s.cases = cases.at(d);
    days.push_back(std::move(s));
  }
  return wmn::SnapshotSeries(first, std::move(districts), std::move(symptoms), std::move(days));
}

/// Reads `date,district,count`; every district must appear on every date
/// of the covered range.
inline std::map<Date, std::vector<std::int64_t>> read_cases(const std::string& path,
                                                            const DistrictLocator& districts) {
  std::unordered_map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < districts.size(); ++i) idx.emplace(districts.id(i), i);
  std::map<Date, std::vector<std::int64_t>> out;
  csv::read_file(path, kCasesHeader, [&](const std::vector<std::string>& f, std::size_t line) {
    const std::string where = path + ":" + std::to_string(line);
    const Date d = Date::parse_iso(f[0]);
    auto it = idx.find(f[1]);
    if (it == idx.end()) throw wmn::ValidationError(where + ": unknown district '" + f[1] + "'");
    auto& row = out.try_emplace(d, std::vector<std::int64_t>(districts.size(), -1)).first->second;
    if (row[it->second] >= 0) throw wmn::ValidationError(where + ": duplicate entry");
    row[it->second] = csv::parse_int(f[2], where);
    if (row[it->second] < 0) throw wmn::ValidationError(where + ": negative count");
  });
  if (out.empty()) throw wmn::ValidationError(path + ": no case rows");
  for (const auto& [d, row] : out)
    for (std::size_t i = 0; i < row.size(); ++i)
      if (row[i] < 0) {
        throw wmn::ValidationError(path + ": no count for district " + districts.id(i) + " on " +
                                   d.iso());
      }
  return out;
}

struct PreprocessResult {
  wmn::SnapshotSeries series;
  HomeAssignment homes;
  UserIds users;
  PreprocessStats stats;
};

/// Full pipeline over in-memory pings and on-disk search logs.
inline PreprocessResult run_preprocess(std::vector<MobilityPing> pings, UserIds users,
                                       const std::vector<fs::path>& search_files,
                                       const std::map<Date, std::vector<std::int64_t>>& cases,
                                       const DistrictLocator& districts,
                                       const SymptomLexicon& lexicon,
                                       const PreprocessOptions& opt) {
  PreprocessResult res;
  const Date first = cases.begin()->first;
  const Date last = cases.rbegin()->first;
  const Date window_last = first + (opt.home_window_days - 1);

  std::stable_sort(pings.begin(), pings.end(), [](const MobilityPing& a, const MobilityPing& b) {
    return a.user != b.user ? a.user < b.user : a.time < b.time;
  });
  res.stats.users_seen = users.size();
  const auto permanent = filter_permanent_users(pings, first, window_last, opt);

  std::set<Date> mobility_days;
  std::map<Date, Matrix> trips;
  const std::size_t n = districts.size();
  StayOptions stay_opt{opt.min_stay_minutes, opt.clock};

  std::size_t begin = 0;
  while (begin < pings.size()) {
    std::size_t end = begin;
    const std::uint32_t user = pings[begin].user;
    while (end < pings.size() && pings[end].user == user) ++end;
    const std::span<const MobilityPing> mine(pings.data() + begin, end - begin);
    for (const auto& p : mine) mobility_days.insert(opt.clock.local_date(p.time));
    begin = end;
    if (!permanent.count(user)) continue;

    std::vector<GeoPoint> night;
    for (const auto& p : mine) {
      const Date d = opt.clock.local_date(p.time);
      if (d >= first && d <= window_last && is_night(p.time, opt)) night.push_back({p.lat, p.lon});
    }
    const auto home = estimate_home(night, opt.bandwidth);
    if (!home) {
      ++res.stats.users_without_night_pings;
      continue;
    }
    const auto district = districts.locate(home->lat, home->lon);
    if (!district) {
      ++res.stats.homes_outside_districts;
      continue;
    }
    res.homes.emplace(user, HomeLocation{*home, *district});

    std::vector<TimedPoint> track;
    track.reserve(mine.size());
    for (const auto& p : mine) track.push_back({p.lat, p.lon, p.time});
    const auto stays = extract_stays(track, districts, stay_opt);
    const Stay* prev = nullptr;
    for (const Stay& s : stays) {
      if (prev && prev->day == s.day && prev->district != s.district && s.day >= first &&
          s.day <= last) {
        auto it = trips.find(s.day);
        if (it == trips.end()) it = trips.emplace(s.day, Matrix(n, n)).first;
        it->second(prev->district, s.district) += 1.0;
      }
      prev = &s;
    }
  }
  res.stats.permanent_users = res.homes.size();

  std::map<Date, Matrix> trip_days;
  for (Date d : mobility_days) {
    if (d < first || d > last) continue;
    auto it = trips.find(d);
    trip_days.emplace(d, it == trips.end() ? Matrix(n, n) : it->second);
  }

  SymptomCounter counter(lexicon, n, first, last);
  for (const auto& file : search_files) {
    for_each_search_record(file.string(), opt.clock,
                           [&](const std::string& id, std::int64_t t, const std::string& query,
                               std::size_t) {
                             const std::uint32_t u = users.intern(id);
                             counter.add(u, res.homes, opt.clock.local_date(t), query, res.stats);
                           });
  }

  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(districts.id(i));
  res.series = assemble_series(trip_days, counter.take(), cases, first, last, std::move(ids),
                               lexicon.names());
  res.users = std::move(users);
  return res;
}

/// Loads raw inputs from disk and runs the pipeline.
inline PreprocessResult preprocess_directories(const fs::path& mobility_dir,
                                               const fs::path& search_dir,
                                               const fs::path& cases_file,
                                               const DistrictLocator& districts,
                                               const SymptomLexicon& lexicon,
                                               const PreprocessOptions& opt) {
  UserIds users;
  std::vector<MobilityPing> pings;
  for (const auto& f : csv_files(mobility_dir)) read_mobility_file(f.string(), opt.clock, users, pings);
  const auto cases = read_cases(cases_file.string(), districts);
  return run_preprocess(std::move(pings), std::move(users), csv_files(search_dir), cases, districts,
                        lexicon, opt);
}

inline void write_homes(const PreprocessResult& r, const DistrictLocator& districts,
                        const std::string& path) {
  std::vector<std::pair<std::string, HomeLocation>> rows;
  for (const auto& [u, h] : r.homes) rows.emplace_back(r.users.name(u), h);
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  csv::Writer out(path, "id,lat,lon,district");
  for (const auto& [id, h] : rows) out.row(id, h.point.lat, h.point.lon, districts.id(h.district));
}

}  // namespace epiwave::preprocess
