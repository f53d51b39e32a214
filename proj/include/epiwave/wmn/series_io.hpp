#pragma once

// Snapshot series on disk: one directory holding, for every ISO date,
//   trips_<date>.csv   from,to,count      (nonzero pairs only)
//   search_<date>.csv  district,symptom,count   (every pair)
//   cases_<date>.csv   district,count

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "epiwave/util/csv.hpp"
#include "epiwave/util/date.hpp"
#include "epiwave/wmn/snapshot.hpp"

namespace epiwave::wmn {

namespace fs = std::filesystem;

inline void write_series(const SnapshotSeries& series, const fs::path& dir) {
  fs::create_directories(dir);
  const auto& d = series.districts();
  const auto& w = series.symptoms();
  for (const auto& snap : series.days()) {
    const std::string date = series.date(snap.day).iso();
    {
      csv::Writer out((dir / ("trips_" + date + ".csv")).string(), "from,to,count");
      for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = 0; j < d.size(); ++j)
          if (snap.trips(i, j) != 0.0) out.row(d[i], d[j], snap.trips(i, j));
    }
    {
      csv::Writer out((dir / ("search_" + date + ".csv")).string(), "district,symptom,count");
      for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t k = 0; k < w.size(); ++k) out.row(d[i], w[k], snap.search(i, k));
    }
    {
      csv::Writer out((dir / ("cases_" + date + ".csv")).string(), "district,count");
      for (std::size_t i = 0; i < d.size(); ++i) out.row(d[i], snap.cases[i]);
    }
  }
}

namespace detail {

inline std::size_t index_of(const std::unordered_map<std::string, std::size_t>& idx,
                            const std::string& key, const std::string& what,
                            const std::string& path) {
  auto it = idx.find(key);
  if (it == idx.end()) throw ValidationError(path + ": unknown " + what + " '" + key + "'");
  return it->second;
}

}  // namespace detail

/// Loads every day found in `dir`. Dates must be consecutive and each day
/// must have all three files.
inline SnapshotSeries read_series(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ValidationError("series directory not found: " + dir.string());
  std::set<Date> dates;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("cases_", 0) == 0 && name.size() == 6 + 10 + 4 &&
        name.substr(16) == ".csv") {
      dates.insert(Date::parse_iso(name.substr(6, 10)));
    }
  }
  if (dates.empty()) throw ValidationError("no cases_<date>.csv files in " + dir.string());
  const Date origin = *dates.begin();
  const Date last = *dates.rbegin();
  std::vector<std::string> missing;
  for (Date d = origin; d <= last; d = d + 1) {
    for (const char* family : {"trips_", "search_", "cases_"}) {
      if (!fs::exists(dir / (family + d.iso() + ".csv"))) missing.push_back(family + d.iso());
    }
  }
  if (!missing.empty()) {
    std::string msg = "series in " + dir.string() + " is missing:";
    for (const auto& m : missing) msg += " " + m;
    throw ValidationError(msg);
  }

  // District order and symptom order come from the first day's files.
  std::vector<std::string> districts, symptoms;
  std::unordered_map<std::string, std::size_t> d_idx, w_idx;
  csv::read_file((dir / ("cases_" + origin.iso() + ".csv")).string(), "district,count",
                 [&](const std::vector<std::string>& f, std::size_t) {
                   if (d_idx.emplace(f[0], districts.size()).second) districts.push_back(f[0]);
                 });
  csv::read_file((dir / ("search_" + origin.iso() + ".csv")).string(), "district,symptom,count",
                 [&](const std::vector<std::string>& f, std::size_t) {
                   if (w_idx.emplace(f[1], symptoms.size()).second) symptoms.push_back(f[1]);
                 });
  const std::size_t n = districts.size(), nw = symptoms.size();

  std::vector<Snapshot> days;
  for (Date d = origin; d <= last; d = d + 1) {
    Snapshot snap;
    snap.day = d - origin;
    snap.trips = Matrix(n, n);
    snap.search = Matrix(n, nw);
    snap.cases.assign(n, -1);
    const std::string tp = (dir / ("trips_" + d.iso() + ".csv")).string();
    csv::read_file(tp, "from,to,count", [&](const std::vector<std::string>& f, std::size_t) {
      const auto i = detail::index_of(d_idx, f[0], "district", tp);
      const auto j = detail::index_of(d_idx, f[1], "district", tp);
      snap.trips(i, j) += csv::parse_double(f[2], tp);
    });
    const std::string sp = (dir / ("search_" + d.iso() + ".csv")).string();
    Matrix seen(n, nw);
    csv::read_file(sp, "district,symptom,count", [&](const std::vector<std::string>& f, std::size_t) {
      const auto i = detail::index_of(d_idx, f[0], "district", sp);
      const auto k = detail::index_of(w_idx, f[1], "symptom", sp);
      snap.search(i, k) += csv::parse_double(f[2], sp);
      seen(i, k) = 1.0;
    });
    for (double v : seen.values())
      if (v == 0.0) throw ValidationError(sp + ": missing district/symptom rows");
    const std::string cp = (dir / ("cases_" + d.iso() + ".csv")).string();
    csv::read_file(cp, "district,count", [&](const std::vector<std::string>& f, std::size_t) {
      const auto i = detail::index_of(d_idx, f[0], "district", cp);
      snap.cases[i] = csv::parse_int(f[1], cp);
    });
    for (auto c : snap.cases)
      if (c < 0) throw ValidationError(cp + ": missing or negative district counts");
    days.push_back(std::move(snap));
  }
  return SnapshotSeries(origin, std::move(districts), std::move(symptoms), std::move(days));
}

}  // namespace epiwave::wmn
