#pragma once

// Train / validation / test anchors over one snapshot series.
//
// The last test_ratio of days is the test region: a test window predicts
// only test days. Every other window ends before it. Validation windows
// come from the 2 * val_ratio days just ahead of the test region, taken as
// alternating 7-anchor blocks (starting with validation) until val_ratio *
// length anchors are collected. All remaining windows train.

#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "epiwave/wmn/windows.hpp"

namespace epiwave::experiment {

struct SplitOptions {
  double train_ratio = 0.7;
  double val_ratio = 0.1;
  double test_ratio = 0.2;
  int block_days = 7;
};

struct Split {
  std::vector<wmn::TrainingWindow> train, validation, test;
  std::int64_t test_start = 0;        ///< first test day
  std::int64_t validation_start = 0;  ///< first day of the validation region

  /// Days covered by the training windows: the only days statistics may see.
  std::vector<std::int64_t> fit_days() const {
    std::set<std::int64_t> days;
    for (const auto& w : train)
      for (auto d = w.first_input(); d <= w.last_target(); ++d) days.insert(d);
    return {days.begin(), days.end()};
  }
};

inline Split split_series(std::size_t length, int d1, int d2, const SplitOptions& opt = {}) {
  if (d1 < 1 || d2 < 1) throw std::invalid_argument("split: D1 and D2 must be positive");
  const double total = opt.train_ratio + opt.val_ratio + opt.test_ratio;
  if (std::abs(total - 1.0) > 1e-9 || opt.train_ratio <= 0 || opt.val_ratio < 0 || opt.test_ratio <= 0) {
    throw std::invalid_argument("split: ratios must be positive and sum to 1");
  }
  const auto len = static_cast<std::int64_t>(length);
  Split s;
  s.test_start = len - std::llround(opt.test_ratio * static_cast<double>(len));
  s.validation_start = s.test_start - std::llround(2.0 * opt.val_ratio * static_cast<double>(len));
  const auto val_target = std::llround(opt.val_ratio * static_cast<double>(len));

  // Smallest length that leaves one test window and one training window
  // ahead of the validation region.
  auto infeasible = [&] {
    const double test_part = opt.test_ratio + 2.0 * opt.val_ratio;
    const auto need = static_cast<long long>(std::ceil((d1 + d2) / std::max(opt.test_ratio, 1.0 - test_part)));
    throw std::invalid_argument("split: series of " + std::to_string(len) + " days too short for D1=" +
                                std::to_string(d1) + ", D2=" + std::to_string(d2) +
                                "; need at least about " + std::to_string(need) + " days");
  };
  if (s.test_start - d2 < d1 || len - s.test_start < d2) infeasible();

  for (std::int64_t t = s.test_start - 1; t + d2 <= len - 1; ++t)
    if (t >= d1 - 1) s.test.push_back({t, d1, d2});

  std::int64_t taken = 0;
  for (std::int64_t t = d1 - 1; t + d2 < s.test_start; ++t) {
    const wmn::TrainingWindow w{t, d1, d2};
    if (t + 1 >= s.validation_start && taken < val_target) {
      const auto block = (t + 1 - s.validation_start) / opt.block_days;
      if (block % 2 == 0) {
        s.validation.push_back(w);
        ++taken;
        continue;
      }
    }
    s.train.push_back(w);
  }
  if (s.test.empty() || s.train.empty()) infeasible();
  return s;
}

}  // namespace epiwave::experiment
