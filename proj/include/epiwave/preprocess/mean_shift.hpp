#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace epiwave::preprocess {

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
};

inline double planar_distance(GeoPoint a, GeoPoint b) noexcept {
  return std::hypot(a.lat - b.lat, a.lon - b.lon);
}

struct MeanShiftOptions {
  double bandwidth = 0.005;     ///< flat kernel radius, degrees
  double tolerance = 1e-6;      ///< stop once a shift is smaller, degrees
  int max_iterations = 500;
};

/// Mode of a flat-kernel mean shift started from every point. Returns the
/// mode that attracts the most points; among equally popular modes the one
/// attracting the earliest point wins. Points are expected in time order.
inline GeoPoint mean_shift_mode(std::span<const GeoPoint> points, MeanShiftOptions opt = {}) {
  if (points.empty()) throw std::invalid_argument("mean_shift_mode: no points");
  if (!(opt.bandwidth > 0.0)) throw std::invalid_argument("mean_shift_mode: bandwidth must be positive");

  struct Mode {
    double lat_sum = 0.0, lon_sum = 0.0;
    std::size_t count = 0;
    GeoPoint center() const {
      return {lat_sum / static_cast<double>(count), lon_sum / static_cast<double>(count)};
    }
  };
  std::vector<Mode> modes;
  const double merge_radius = opt.bandwidth / 2.0;

  for (const GeoPoint& start : points) {
    GeoPoint x = start;
    for (int it = 0; it < opt.max_iterations; ++it) {
      double lat = 0.0, lon = 0.0;
      std::size_t k = 0;
      for (const GeoPoint& p : points) {
        if (planar_distance(p, x) <= opt.bandwidth) {
          lat += p.lat;
          lon += p.lon;
          ++k;
        }
      }
      if (k == 0) break;
      const GeoPoint next{lat / static_cast<double>(k), lon / static_cast<double>(k)};
      const double shift = planar_distance(next, x);
      x = next;
      if (shift < opt.tolerance) break;
    }
    Mode* home = nullptr;
    for (Mode& m : modes) {
      if (planar_distance(m.center(), x) <= merge_radius) {
        home = &m;
        break;
      }
    }
    if (!home) home = &modes.emplace_back();
    home->lat_sum += x.lat;
    home->lon_sum += x.lon;
    ++home->count;
  }

  const Mode* best = &modes.front();
  for (const Mode& m : modes)
    if (m.count > best->count) best = &m;
  return best->center();
}

}  // namespace epiwave::preprocess
