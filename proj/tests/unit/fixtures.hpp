#pragma once

// Small random inputs shared by the model and baseline tests.

#include "epiwave/model/data.hpp"
#include "epiwave/util/rng.hpp"

namespace epiwave::fixtures {

inline Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c, double lo = -1.0, double hi = 1.0) {
  Matrix m(r, c);
  for (auto& v : m.values()) v = rng.uniform(lo, hi);
  return m;
}

/// Series with random trips, searches and case counts.
inline wmn::SnapshotSeries random_series(std::uint64_t seed, std::size_t n, std::size_t words, std::size_t days) {
  Rng rng(seed);
  std::vector<std::string> ids, symptoms;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("d" + std::to_string(i));
  for (std::size_t w = 0; w < words; ++w) symptoms.push_back("s" + std::to_string(w));
  std::vector<wmn::Snapshot> snaps;
  for (std::size_t t = 0; t < days; ++t) {
    wmn::Snapshot s{static_cast<std::int64_t>(t), Matrix(n, n), Matrix(n, words), std::vector<std::int64_t>(n)};
    for (auto& v : s.trips.values()) v = static_cast<double>(rng.below(30));
    for (auto& v : s.search.values()) v = static_cast<double>(rng.below(40));
    for (auto& c : s.cases) c = static_cast<std::int64_t>(rng.below(60));
    snaps.push_back(std::move(s));
  }
  return wmn::SnapshotSeries(Date::parse_iso("2021-01-01"), ids, symptoms, std::move(snaps));
}

/// Model inputs of a random series with stats fitted on every day.
inline model::PreparedSeries random_prepared(std::uint64_t seed, std::size_t n, std::size_t words,
                                             std::size_t days) {
  const auto series = random_series(seed, n, words, days);
  std::vector<std::int64_t> all;
  for (std::size_t t = 0; t < days; ++t) all.push_back(static_cast<std::int64_t>(t));
  return model::prepare_series(series, all, words, wmn::AdjacencyNorm::column);
}

}  // namespace epiwave::fixtures
