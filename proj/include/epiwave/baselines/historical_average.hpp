#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "epiwave/core/matrix.hpp"
#include "epiwave/wmn/snapshot.hpp"

namespace epiwave::baselines {

/// Mean of each district's cases over days [first, last], repeated D2 times.
inline Matrix mean_cases(const wmn::SnapshotSeries& series, std::int64_t first, std::int64_t last, int d2) {
  if (first < 0 || last < first || last >= static_cast<std::int64_t>(series.size())) {
    throw std::invalid_argument("historical average: day range [" + std::to_string(first) + ", " +
                                std::to_string(last) + "] outside the series");
  }
  if (d2 < 1) throw std::invalid_argument("historical average: D2 must be positive");
  Matrix out(series.n(), static_cast<std::size_t>(d2));
  const double days = static_cast<double>(last - first + 1);
  for (std::size_t i = 0; i < series.n(); ++i) {
    double s = 0.0;
    for (auto t = first; t <= last; ++t) s += static_cast<double>(series[static_cast<std::size_t>(t)].cases[i]);
    for (int j = 0; j < d2; ++j) out(i, static_cast<std::size_t>(j)) = s / days;
  }
  return out;
}

/// Every day up to and including `anchor`.
inline Matrix ha_all(const wmn::SnapshotSeries& series, std::int64_t anchor, int d2) {
  return mean_cases(series, 0, anchor, d2);
}

/// The last `x` days up to and including `anchor`.
inline Matrix ha_window(const wmn::SnapshotSeries& series, std::int64_t anchor, int x, int d2) {
  if (x < 1) throw std::invalid_argument("ha_window: window must be positive");
  if (anchor - x + 1 < 0) {
    throw std::invalid_argument("ha_window: anchor " + std::to_string(anchor) + " has fewer than " +
                                std::to_string(x) + " days of history");
  }
  return mean_cases(series, anchor - x + 1, anchor, d2);
}

}  // namespace epiwave::baselines
