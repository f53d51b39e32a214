#pragma once

// Raw record schemas and their CSV readers:
//   mobility  id,lat,lon,unixtime,date     (date as YYYYMMDD, local)
//   search    id,time,query                (time as YYYY-MM-DD HH:MM:SS, local)
//   cases     date,district,count          (ISO date)

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "epiwave/util/csv.hpp"
#include "epiwave/util/date.hpp"

namespace epiwave::preprocess {

namespace fs = std::filesystem;

inline constexpr const char* kMobilityHeader = "id,lat,lon,unixtime,date";
inline constexpr const char* kSearchHeader = "id,time,query";
inline constexpr const char* kCasesHeader = "date,district,count";

struct MobilityPing {
  std::uint32_t user = 0;  ///< index into UserIds
  double lat = 0.0;
  double lon = 0.0;
  std::int64_t time = 0;   ///< unix seconds
};

struct SearchRecord {
  std::uint32_t user = 0;
  std::int64_t time = 0;
  std::string query;
};

/// Interns opaque user id strings.
class UserIds {
 public:
  std::uint32_t intern(const std::string& id) {
    auto [it, inserted] = index_.emplace(id, static_cast<std::uint32_t>(names_.size()));
    if (inserted) names_.push_back(id);
    return it->second;
  }
  const std::string& name(std::uint32_t i) const { return names_.at(i); }
  std::size_t size() const noexcept { return names_.size(); }
  bool contains(const std::string& id) const { return index_.count(id) != 0; }

 private:
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::string> names_;
};

/// CSV files of a directory in name order.
inline std::vector<fs::path> csv_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw csv::ParseError("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

inline void read_mobility_file(const std::string& path, const LocalClock& clock, UserIds& users,
                               std::vector<MobilityPing>& out) {
  csv::read_file(path, kMobilityHeader, [&](const std::vector<std::string>& f, std::size_t line) {
    const std::string where = path + ":" + std::to_string(line);
    MobilityPing p;
    p.lat = csv::parse_double(f[1], where + " lat");
    p.lon = csv::parse_double(f[2], where + " lon");
    p.time = csv::parse_int(f[3], where + " unixtime");
    if (p.lat < -90.0 || p.lat > 90.0 || p.lon < -180.0 || p.lon > 180.0) {
      throw csv::ParseError(where + ": coordinates out of range");
    }
    if (Date::parse_compact(f[4]) != clock.local_date(p.time)) {
      throw csv::ParseError(where + ": date " + f[4] + " disagrees with unixtime " + f[3] +
                            " at the configured UTC offset");
    }
    p.user = users.intern(f[0]);
    out.push_back(p);
  });
}

template <typename Fn>
void for_each_search_record(const std::string& path, const LocalClock& clock, Fn&& fn) {
  csv::read_file(path, kSearchHeader, [&](const std::vector<std::string>& f, std::size_t line) {
    const std::int64_t t = clock.parse_timestamp(f[1]);
    fn(f[0], t, f[2], line);
  });
}

}  // namespace epiwave::preprocess
