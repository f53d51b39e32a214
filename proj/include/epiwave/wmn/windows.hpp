#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace epiwave::wmn {

/// D1 input days ending at the anchor day, followed by D2 target days.
struct TrainingWindow {
  std::int64_t anchor = 0;
  int d1 = 0;
  int d2 = 0;

  std::int64_t first_input() const noexcept { return anchor - d1 + 1; }
  std::int64_t last_input() const noexcept { return anchor; }
  std::int64_t first_target() const noexcept { return anchor + 1; }
  std::int64_t last_target() const noexcept { return anchor + d2; }

  bool operator==(const TrainingWindow&) const = default;
};

/// Inclusive day range.
struct DayRange {
  std::int64_t first = 0;
  std::int64_t last = -1;
};

/// One window per feasible anchor inside `range`, stride one day. Throws if
/// no window fits.
inline std::vector<TrainingWindow> build_windows(int d1, int d2, DayRange range) {
  if (d1 < 1 || d2 < 1) throw std::invalid_argument("build_windows: D1 and D2 must be positive");
  std::vector<TrainingWindow> out;
  for (std::int64_t t = range.first + d1 - 1; t + d2 <= range.last; ++t) out.push_back({t, d1, d2});
  if (out.empty()) {
    throw std::invalid_argument("build_windows: range of " +
                                std::to_string(range.last - range.first + 1) +
                                " days cannot hold D1=" + std::to_string(d1) +
                                " plus D2=" + std::to_string(d2));
  }
  return out;
}

inline std::vector<TrainingWindow> build_windows(std::size_t series_length, int d1, int d2) {
  return build_windows(d1, d2, DayRange{0, static_cast<std::int64_t>(series_length) - 1});
}

}  // namespace epiwave::wmn
