#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "epiwave/wmn/snapshot.hpp"

namespace epiwave::wmn {

enum class AdjacencyNorm { column, symmetric };

inline AdjacencyNorm parse_adjacency_norm(const std::string& s) {
  if (s == "column") return AdjacencyNorm::column;
  if (s == "symmetric") return AdjacencyNorm::symmetric;
  throw std::invalid_argument("unknown adjacency_norm '" + s + "' (column|symmetric)");
}
inline std::string to_string(AdjacencyNorm a) {
  return a == AdjacencyNorm::column ? "column" : "symmetric";
}

/// Propagation matrix of a day's trips: self-loops are added first, then
/// either every column is scaled to sum to 1, or the result is scaled by
/// D^-1/2 on both sides with D the row sums.
inline Matrix normalize_adjacency(const Matrix& trips, AdjacencyNorm mode = AdjacencyNorm::column) {
  if (trips.rows() != trips.cols()) {
    throw ShapeError("normalize_adjacency: trips must be square, got " + trips.shape());
  }
  for (double v : trips.values()) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError("normalize_adjacency: trip counts must be finite and nonnegative");
    }
  }
  const std::size_t n = trips.rows();
  Matrix e = trips;
  for (std::size_t i = 0; i < n; ++i) e(i, i) += 1.0;
  if (mode == AdjacencyNorm::column) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += e(i, j);
      for (std::size_t i = 0; i < n; ++i) e(i, j) /= s;
    }
    return e;
  }
  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += e(i, j);
    inv_sqrt[i] = 1.0 / std::sqrt(s);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) e(i, j) *= inv_sqrt[i] * inv_sqrt[j];
  return e;
}

/// Per-district min/max of search counts (per word) and case counts, fitted
/// on a chosen set of days.
struct NormalizationStats {
  Matrix search_min, search_max;   ///< n x n_w
  std::vector<double> case_min, case_max;  ///< n

  static NormalizationStats fit(const SnapshotSeries& series, const std::vector<std::int64_t>& days) {
    if (days.empty()) throw ValidationError("normalization: no fitting days");
    const std::size_t n = series.n(), w = series.n_words();
    const double inf = std::numeric_limits<double>::infinity();
    NormalizationStats s{Matrix(n, w, inf), Matrix(n, w, -inf), std::vector<double>(n, inf),
                         std::vector<double>(n, -inf)};
    for (auto t : days) {
      const Snapshot& snap = series[static_cast<std::size_t>(t)];
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < w; ++k) {
          s.search_min(i, k) = std::min(s.search_min(i, k), snap.search(i, k));
          s.search_max(i, k) = std::max(s.search_max(i, k), snap.search(i, k));
        }
        const double c = static_cast<double>(snap.cases[i]);
        s.case_min[i] = std::min(s.case_min[i], c);
        s.case_max[i] = std::max(s.case_max[i], c);
      }
    }
    return s;
  }

  /// Search entry mapped into [0, 1]; values outside the fitted range are
  /// clipped and a constant fitted series maps to 0.
  double search_value(std::size_t district, std::size_t word, double x) const {
    const double lo = search_min(district, word), hi = search_max(district, word);
    if (!(hi > lo)) return 0.0;
    return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
  }

  double case_value(std::size_t district, double x) const {
    const double lo = case_min[district], hi = case_max[district];
    if (!(hi > lo)) return 0.0;
    return (x - lo) / (hi - lo);
  }

  /// Inverse of case_value; a constant district maps back to its constant.
  double case_count(std::size_t district, double normalized) const {
    const double lo = case_min[district], hi = case_max[district];
    if (!(hi > lo)) return lo;
    return lo + normalized * (hi - lo);
  }

  bool operator==(const NormalizationStats&) const = default;
};

/// Search matrix of one snapshot with every entry normalized.
inline Matrix normalize_search(const Matrix& search, const NormalizationStats& stats) {
  Matrix out(search.rows(), search.cols());
  for (std::size_t i = 0; i < search.rows(); ++i)
    for (std::size_t k = 0; k < search.cols(); ++k) out(i, k) = stats.search_value(i, k, search(i, k));
  return out;
}

/// Every snapshot's search matrix normalized.
inline std::vector<Matrix> normalize_search(const SnapshotSeries& series,
                                            const NormalizationStats& stats) {
  std::vector<Matrix> out;
  out.reserve(series.size());
  for (const auto& snap : series.days()) out.push_back(normalize_search(snap.search, stats));
  return out;
}

inline std::vector<double> normalize_cases(std::span<const double> counts,
                                           const NormalizationStats& stats) {
  std::vector<double> out(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = stats.case_value(i, counts[i]);
  return out;
}

inline std::vector<double> denormalize_cases(std::span<const double> values,
                                             const NormalizationStats& stats) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = stats.case_count(i, values[i]);
  return out;
}

/// Indices of the k symptoms with the largest totals over `days`, ties
/// broken by symptom name.
inline std::vector<std::size_t> top_symptoms(const SnapshotSeries& series,
                                             const std::vector<std::int64_t>& days, std::size_t k) {
  if (k == 0 || k > series.n_words()) {
    throw std::invalid_argument("top_symptoms: k=" + std::to_string(k) + " outside [1, " +
                                std::to_string(series.n_words()) + "]");
  }
  std::vector<double> total(series.n_words(), 0.0);
  for (auto t : days) {
    const auto& s = series[static_cast<std::size_t>(t)].search;
    for (std::size_t i = 0; i < s.rows(); ++i)
      for (std::size_t w = 0; w < s.cols(); ++w) total[w] += s(i, w);
  }
  std::vector<std::size_t> order(series.n_words());
  for (std::size_t w = 0; w < order.size(); ++w) order[w] = w;
  const auto& names = series.symptoms();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (total[a] != total[b]) return total[a] > total[b];
    return names[a] < names[b];
  });
  order.resize(k);
  return order;
}

}  // namespace epiwave::wmn
