#pragma once

// Model-ready view of a snapshot series: normalized adjacency, the selected
// symptom columns and per-district case values for every day.

#include <cstdint>
#include <vector>

#include "epiwave/core/matrix.hpp"
#include "epiwave/wmn/normalize.hpp"
#include "epiwave/wmn/snapshot.hpp"
#include "epiwave/wmn/windows.hpp"

namespace epiwave::model {

struct PreparedSeries {
  std::vector<Matrix> adjacency;  ///< per day, n x n
  std::vector<Matrix> search;     ///< per day, n x k, normalized
  std::vector<Matrix> cases;      ///< per day, n x 1, normalized
  std::vector<std::size_t> symptoms;  ///< selected columns of the raw search matrix
  wmn::NormalizationStats stats;

  std::size_t days() const noexcept { return cases.size(); }
  std::size_t n() const { return cases.empty() ? 0 : cases.front().rows(); }
  std::size_t k() const noexcept { return symptoms.size(); }

  /// Normalized targets of a window, n x D2.
  Matrix targets(const wmn::TrainingWindow& w) const {
    Matrix out(n(), static_cast<std::size_t>(w.d2));
    for (int j = 0; j < w.d2; ++j) {
      const Matrix& c = cases.at(static_cast<std::size_t>(w.first_target() + j));
      for (std::size_t i = 0; i < out.rows(); ++i) out(i, static_cast<std::size_t>(j)) = c(i, 0);
    }
    return out;
  }
};

inline PreparedSeries prepare_series(const wmn::SnapshotSeries& series,
                                     const wmn::NormalizationStats& stats,
                                     std::vector<std::size_t> symptoms,
                                     wmn::AdjacencyNorm norm) {
  PreparedSeries p;
  p.symptoms = std::move(symptoms);
  p.stats = stats;
  const std::size_t n = series.n();
  for (const auto& snap : series.days()) {
    p.adjacency.push_back(wmn::normalize_adjacency(snap.trips, norm));
    Matrix s(n, p.symptoms.size());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < p.symptoms.size(); ++j)
        s(i, j) = stats.search_value(i, p.symptoms[j], snap.search(i, p.symptoms[j]));
    p.search.push_back(std::move(s));
    Matrix c(n, 1);
    for (std::size_t i = 0; i < n; ++i) c(i, 0) = stats.case_value(i, static_cast<double>(snap.cases[i]));
    p.cases.push_back(std::move(c));
  }
  return p;
}

/// Fits stats and symptom ranking on `fit_days`, then prepares every day.
inline PreparedSeries prepare_series(const wmn::SnapshotSeries& series,
                                     const std::vector<std::int64_t>& fit_days, std::size_t k,
                                     wmn::AdjacencyNorm norm) {
  const auto stats = wmn::NormalizationStats::fit(series, fit_days);
  return prepare_series(series, stats, wmn::top_symptoms(series, fit_days, k), norm);
}

}  // namespace epiwave::model
