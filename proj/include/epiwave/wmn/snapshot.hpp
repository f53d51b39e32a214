#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "epiwave/core/matrix.hpp"
#include "epiwave/util/date.hpp"

namespace epiwave::wmn {

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One day of the web search-mobility network.
struct Snapshot {
  std::int64_t day = 0;           ///< offset from the series origin
  Matrix trips;                   ///< n x n, (i, j) = trips from district i to j
  Matrix search;                  ///< n x n_w symptom query counts by home district
  std::vector<std::int64_t> cases;  ///< n new infections

  std::size_t districts() const noexcept { return cases.size(); }

  void validate(std::size_t n, std::size_t n_words) const {
    const std::string where = "snapshot day " + std::to_string(day);
    if (trips.rows() != n || trips.cols() != n) {
      throw ValidationError(where + ": trips " + trips.shape() + " expected " +
                            Matrix::shape_string(n, n));
    }
    if (search.rows() != n || search.cols() != n_words) {
      throw ValidationError(where + ": search " + search.shape() + " expected " +
                            Matrix::shape_string(n, n_words));
    }
    if (cases.size() != n) throw ValidationError(where + ": case vector length mismatch");
    for (double v : trips.values())
      if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError(where + ": negative trip count");
    for (double v : search.values())
      if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError(where + ": negative search count");
    for (auto c : cases)
      if (c < 0) throw ValidationError(where + ": negative case count");
  }
};

/// Contiguous daily snapshots over a fixed district and symptom set.
class SnapshotSeries {
 public:
  SnapshotSeries() = default;
  SnapshotSeries(Date origin, std::vector<std::string> districts, std::vector<std::string> symptoms,
                 std::vector<Snapshot> days)
      : origin_(origin),
        districts_(std::move(districts)),
        symptoms_(std::move(symptoms)),
        days_(std::move(days)) {
    for (std::size_t t = 0; t < days_.size(); ++t) {
      if (days_[t].day != static_cast<std::int64_t>(t)) {
        throw ValidationError("series: day " + std::to_string(days_[t].day) + " at position " +
                              std::to_string(t) + " breaks consecutive order");
      }
      days_[t].validate(districts_.size(), symptoms_.size());
    }
  }

  Date origin() const noexcept { return origin_; }
  Date date(std::int64_t day) const noexcept { return origin_ + day; }
  const std::vector<std::string>& districts() const noexcept { return districts_; }
  const std::vector<std::string>& symptoms() const noexcept { return symptoms_; }
  std::size_t size() const noexcept { return days_.size(); }
  std::size_t n() const noexcept { return districts_.size(); }
  std::size_t n_words() const noexcept { return symptoms_.size(); }
  const Snapshot& operator[](std::size_t t) const { return days_.at(t); }
  Snapshot& mutable_day(std::size_t t) { return days_.at(t); }
  const std::vector<Snapshot>& days() const noexcept { return days_; }

 private:
  Date origin_;
  std::vector<std::string> districts_;
  std::vector<std::string> symptoms_;
  std::vector<Snapshot> days_;
};

}  // namespace epiwave::wmn
