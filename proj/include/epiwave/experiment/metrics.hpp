#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "epiwave/core/matrix.hpp"

namespace epiwave::experiment {

struct Metrics {
  double mae = 0.0;
  double rmse = 0.0;
};

/// Absolute and squared errors pooled over every (window, district, day).
class ErrorPool {
 public:
  void add(double predicted, double actual) {
    const double d = predicted - actual;
    abs_ += std::abs(d);
    sq_ += d * d;
    ++count_;
  }
  void add(const Matrix& predicted, const Matrix& actual) {
    Matrix::require_same_shape(predicted, actual, "evaluate");
    for (std::size_t i = 0; i < predicted.size(); ++i) add(predicted.values()[i], actual.values()[i]);
  }
  std::size_t count() const noexcept { return count_; }
  Metrics metrics() const {
    if (count_ == 0) throw std::invalid_argument("evaluate: no forecasts");
    const double n = static_cast<double>(count_);
    return {abs_ / n, std::sqrt(sq_ / n)};
  }

 private:
  double abs_ = 0.0, sq_ = 0.0;
  std::size_t count_ = 0;
};

inline Metrics evaluate(const std::vector<Matrix>& predicted, const std::vector<Matrix>& actual) {
  if (predicted.size() != actual.size()) throw ShapeError("evaluate: forecast and actual counts differ");
  ErrorPool pool;
  for (std::size_t w = 0; w < predicted.size(); ++w) pool.add(predicted[w], actual[w]);
  return pool.metrics();
}

/// Per district: sum |actual - predicted| / sum |actual| over all windows
/// and days; empty where the district has no actual cases.
inline std::vector<std::optional<double>> relative_errors(const std::vector<Matrix>& predicted,
                                                          const std::vector<Matrix>& actual) {
  if (predicted.size() != actual.size() || predicted.empty()) {
    throw ShapeError("relative_errors: need matching, nonempty forecast lists");
  }
  const std::size_t n = actual.front().rows();
  std::vector<double> num(n, 0.0), den(n, 0.0);
  for (std::size_t w = 0; w < predicted.size(); ++w) {
    Matrix::require_same_shape(predicted[w], actual[w], "relative_errors");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < actual[w].cols(); ++j) {
        num[i] += std::abs(actual[w](i, j) - predicted[w](i, j));
        den[i] += std::abs(actual[w](i, j));
      }
  }
  std::vector<std::optional<double>> out(n);
  for (std::size_t i = 0; i < n; ++i)
    if (den[i] > 0.0) out[i] = num[i] / den[i];
  return out;
}

}  // namespace epiwave::experiment
