#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "epiwave/util/csv.hpp"

namespace epiwave::preprocess {

/// Assigns a coordinate to a district index. Polygon-backed maps plug in
/// here; the rectangle map below serves desk-scale data.
class DistrictLocator {
 public:
  virtual ~DistrictLocator() = default;
  virtual std::size_t size() const = 0;
  virtual const std::string& id(std::size_t index) const = 0;
  virtual std::optional<std::size_t> locate(double lat, double lon) const = 0;
};

struct BoundingBox {
  double min_lat = 0.0, min_lon = 0.0, max_lat = 0.0, max_lon = 0.0;

  bool contains(double lat, double lon) const noexcept {
    return lat >= min_lat && lat < max_lat && lon >= min_lon && lon < max_lon;
  }
};

/// Districts as disjoint half-open lat/lon rectangles.
class RectDistrictMap final : public DistrictLocator {
 public:
  struct District {
    std::string id;
    BoundingBox box;
  };

  RectDistrictMap() = default;
  explicit RectDistrictMap(std::vector<District> districts) : districts_(std::move(districts)) {
    for (std::size_t a = 0; a < districts_.size(); ++a)
      for (std::size_t b = a + 1; b < districts_.size(); ++b)
        if (overlap(districts_[a].box, districts_[b].box)) {
          throw std::invalid_argument("district map: " + districts_[a].id + " overlaps " +
                                      districts_[b].id);
        }
  }

  /// n cells tiling `area`: rows of ceil(sqrt(n)) cells, the last row
  /// stretched so the whole box stays covered. Ids are D01, D02, ...
  static RectDistrictMap grid(std::size_t n, BoundingBox area) {
    if (n == 0) throw std::invalid_argument("district grid needs at least one district");
    const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    const std::size_t rows = (n + cols - 1) / cols;
    const double h = (area.max_lat - area.min_lat) / static_cast<double>(rows);
    std::vector<District> out;
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t in_row = std::min(cols, n - r * cols);
      const double w = (area.max_lon - area.min_lon) / static_cast<double>(in_row);
      for (std::size_t c = 0; c < in_row; ++c) {
        char id[16];
        std::snprintf(id, sizeof(id), "D%02zu", out.size() + 1);
        BoundingBox b{area.min_lat + h * static_cast<double>(r), area.min_lon + w * static_cast<double>(c),
                      r + 1 == rows ? area.max_lat : area.min_lat + h * static_cast<double>(r + 1),
                      c + 1 == in_row ? area.max_lon : area.min_lon + w * static_cast<double>(c + 1)};
        out.push_back({id, b});
      }
    }
    return RectDistrictMap(std::move(out));
  }

  static RectDistrictMap load(const std::string& path) {
    std::vector<District> d;
    csv::read_file(path, "district,min_lat,min_lon,max_lat,max_lon",
                   [&](const std::vector<std::string>& f, std::size_t) {
                     d.push_back({f[0],
                                  {csv::parse_double(f[1], path), csv::parse_double(f[2], path),
                                   csv::parse_double(f[3], path), csv::parse_double(f[4], path)}});
                   });
    return RectDistrictMap(std::move(d));
  }

  void save(const std::string& path) const {
    csv::Writer out(path, "district,min_lat,min_lon,max_lat,max_lon");
    for (const auto& d : districts_)
      out.row(d.id, d.box.min_lat, d.box.min_lon, d.box.max_lat, d.box.max_lon);
  }

  std::size_t size() const override { return districts_.size(); }
  const std::string& id(std::size_t i) const override { return districts_.at(i).id; }
  const BoundingBox& box(std::size_t i) const { return districts_.at(i).box; }
  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (const auto& d : districts_) out.push_back(d.id);
    return out;
  }

  std::optional<std::size_t> locate(double lat, double lon) const override {
    for (std::size_t i = 0; i < districts_.size(); ++i)
      if (districts_[i].box.contains(lat, lon)) return i;
    return std::nullopt;
  }

 private:
  static bool overlap(const BoundingBox& a, const BoundingBox& b) {
    return a.min_lat < b.max_lat && b.min_lat < a.max_lat && a.min_lon < b.max_lon &&
           b.min_lon < a.max_lon;
  }

  std::vector<District> districts_;
};

}  // namespace epiwave::preprocess
