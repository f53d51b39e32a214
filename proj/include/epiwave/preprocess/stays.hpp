#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "epiwave/core/matrix.hpp"
#include "epiwave/preprocess/district_map.hpp"
#include "epiwave/util/date.hpp"

namespace epiwave::preprocess {

struct TimedPoint {
  double lat = 0.0;
  double lon = 0.0;
  std::int64_t time = 0;
};

/// Presence in one district on one local day.
struct Stay {
  std::size_t district = 0;
  std::int64_t enter = 0;  ///< unix seconds
  std::int64_t leave = 0;
  Date day;

  std::int64_t duration() const noexcept { return leave - enter; }
  bool operator==(const Stay&) const = default;
};

struct StayOptions {
  int min_stay_minutes = 10;
  LocalClock clock;
};

/// Stays of one user. Consecutive pings in the same district form a run
/// from its first to its last ping; runs are cut at local midnight and
/// pieces shorter than the minimum stay are dropped. Pings outside every
/// district are ignored. Input must be time-sorted.
inline std::vector<Stay> extract_stays(std::span<const TimedPoint> pings,
                                       const DistrictLocator& districts, StayOptions opt = {}) {
  std::vector<Stay> out;
  const std::int64_t min_stay = static_cast<std::int64_t>(opt.min_stay_minutes) * 60;
  auto emit_run = [&](std::size_t district, std::int64_t enter, std::int64_t leave) {
    std::int64_t start = enter;
    while (true) {
      const Date day = opt.clock.local_date(start);
      const std::int64_t next_midnight = opt.clock.midnight(day + 1);
      const std::int64_t end = leave < next_midnight ? leave : next_midnight;
      if (end - start >= min_stay) out.push_back({district, start, end, day});
      if (leave <= next_midnight) break;
      start = next_midnight;
    }
  };

  bool open = false;
  std::size_t run_district = 0;
  std::int64_t run_enter = 0, run_leave = 0;
  for (std::size_t k = 0; k < pings.size(); ++k) {
    const TimedPoint& p = pings[k];
    if (k > 0 && p.time < pings[k - 1].time) {
      throw std::invalid_argument("extract_stays: pings not time-sorted");
    }
    const auto d = districts.locate(p.lat, p.lon);
    if (!d) continue;
    if (open && *d == run_district) {
      run_leave = p.time;
      continue;
    }
    if (open) emit_run(run_district, run_enter, run_leave);
    open = true;
    run_district = *d;
    run_enter = run_leave = p.time;
  }
  if (open) emit_run(run_district, run_enter, run_leave);
  return out;
}

/// Adds one trip per consecutive pair of distinct-district stays that fall
/// on `day`. `stays` is one user's time-ordered output of extract_stays.
inline void count_trips(std::span<const Stay> stays, Date day, Matrix& trips) {
  const Stay* prev = nullptr;
  for (const Stay& s : stays) {
    if (s.day != day) continue;
    if (prev && prev->district != s.district) trips(prev->district, s.district) += 1.0;
    prev = &s;
  }
}

/// Trip matrix of one day over many users' stay lists.
inline Matrix count_trips(std::span<const std::vector<Stay>> users, Date day, std::size_t n) {
  Matrix trips(n, n);
  for (const auto& stays : users) count_trips(stays, day, trips);
  return trips;
}

}  // namespace epiwave::preprocess
