#pragma once

// CSV reports of a run grid:
//   summary.csv         model,scenario_d1,scenario_d2,seed,mae,rmse,seconds (+ seed=mean rows)
//   series/<model>_d1-<D1>_d2-<D2>.csv   seed,anchor,day,date,district,predicted,actual
//   relative_error.csv  model,scenario_d1,scenario_d2,district,relative_error
//   training_log.csv    model,scenario_d1,scenario_d2,seed,learning_rate,selected,epoch,train_loss,val_loss
//   failures.csv        model,scenario_d1,scenario_d2,seed,kind,message

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "epiwave/experiment/runner.hpp"
#include "epiwave/util/csv.hpp"

namespace epiwave::experiment {

namespace fs = std::filesystem;

inline constexpr const char* kSummaryHeader = "model,scenario_d1,scenario_d2,seed,mae,rmse,seconds";
inline constexpr const char* kSeriesHeader = "seed,anchor,day,date,district,predicted,actual";

/// Consecutive records sharing model and scenario.
template <typename Fn>
void for_each_group(const std::vector<RunRecord>& records, Fn&& fn) {
  std::size_t b = 0;
  while (b < records.size()) {
    std::size_t e = b;
    const auto& k = records[b].key;
    while (e < records.size() && records[e].key.model == k.model && records[e].key.d1 == k.d1 &&
           records[e].key.d2 == k.d2)
      ++e;
    fn(std::vector<RunRecord>(records.begin() + static_cast<std::ptrdiff_t>(b),
                              records.begin() + static_cast<std::ptrdiff_t>(e)));
    b = e;
  }
}

/// Mean metrics and seconds over the successful records of a group.
inline std::optional<std::tuple<double, double, double>> group_mean(const std::vector<RunRecord>& g) {
  double mae = 0, rmse = 0, secs = 0;
  std::size_t n = 0;
  for (const auto& r : g) {
    if (!r.ok()) continue;
    mae += r.metrics.mae;
    rmse += r.metrics.rmse;
    secs += r.seconds;
    ++n;
  }
  if (n == 0) return std::nullopt;
  const double d = static_cast<double>(n);
  return std::make_tuple(mae / d, rmse / d, secs / d);
}

/// Summary-shaped rows, optionally prefixed by fixed leading fields.
inline void write_metric_rows(csv::Writer& out, const std::vector<RunRecord>& records,
                              const std::vector<std::string>& prefix = {}) {
  for_each_group(records, [&](const std::vector<RunRecord>& g) {
    auto row = [&](const std::string& seed, double mae, double rmse, double secs) {
      std::vector<std::string> f = prefix;
      const auto& k = g.front().key;
      for (const auto& s : {k.model, std::to_string(k.d1), std::to_string(k.d2), seed, csv::format_double(mae),
                            csv::format_double(rmse), csv::format_fixed(secs, 3)})
        f.push_back(s);
      out.row_fields(f);
    };
    for (const auto& r : g)
      if (r.ok()) row(std::to_string(r.key.seed), r.metrics.mae, r.metrics.rmse, r.seconds);
    if (const auto m = group_mean(g)) row("mean", std::get<0>(*m), std::get<1>(*m), std::get<2>(*m));
  });
}

inline std::string series_file_name(const RunKey& k) {
  return k.model + "_d1-" + std::to_string(k.d1) + "_d2-" + std::to_string(k.d2) + ".csv";
}

inline void write_series_files(const fs::path& dir, const std::vector<RunRecord>& records,
                               const wmn::SnapshotSeries& series) {
  fs::create_directories(dir);
  for_each_group(records, [&](const std::vector<RunRecord>& g) {
    csv::Writer out((dir / series_file_name(g.front().key)).string(), kSeriesHeader);
    for (const auto& r : g) {
      if (!r.ok()) continue;
      for (std::size_t w = 0; w < r.windows.size(); ++w)
        for (std::size_t j = 0; j < r.predicted[w].cols(); ++j) {
          const auto day = r.windows[w].first_target() + static_cast<std::int64_t>(j);
          for (std::size_t i = 0; i < series.n(); ++i)
            out.row(static_cast<unsigned long long>(r.key.seed), static_cast<long long>(r.windows[w].anchor),
                    static_cast<long long>(day), series.date(static_cast<std::size_t>(day)).iso(),
                    series.districts()[i], r.predicted[w](i, j), r.actual[w](i, j));
        }
    }
  });
}

inline void write_relative_errors(const std::string& path, const std::vector<RunRecord>& records,
                                  const wmn::SnapshotSeries& series) {
  csv::Writer out(path, "model,scenario_d1,scenario_d2,district,relative_error");
  for_each_group(records, [&](const std::vector<RunRecord>& g) {
    std::vector<Matrix> pred, act;
    for (const auto& r : g)
      if (r.ok()) {
        pred.insert(pred.end(), r.predicted.begin(), r.predicted.end());
        act.insert(act.end(), r.actual.begin(), r.actual.end());
      }
    if (pred.empty()) return;
    const auto rel = relative_errors(pred, act);
    const auto& k = g.front().key;
    for (std::size_t i = 0; i < rel.size(); ++i)
      out.row(k.model, k.d1, k.d2, series.districts()[i], rel[i] ? csv::format_double(*rel[i]) : std::string("NA"));
  });
}

inline void write_training_log(const std::string& path, const std::vector<RunRecord>& records) {
  csv::Writer out(path, "model,scenario_d1,scenario_d2,seed,learning_rate,selected,epoch,train_loss,val_loss");
  for (const auto& r : records)
    for (const auto& c : r.training)
      for (const auto& e : c.log)
        out.row(r.key.model, r.key.d1, r.key.d2, static_cast<unsigned long long>(r.key.seed), c.learning_rate,
                c.selected ? 1 : 0, e.epoch, e.train_loss,
                std::isnan(e.val_loss) ? std::string("NA") : csv::format_double(e.val_loss));
}

/// Returns true when any record holds a hard error.
inline bool write_failures(const std::string& path, const std::vector<RunRecord>& records) {
  csv::Writer out(path, "model,scenario_d1,scenario_d2,seed,kind,message");
  bool hard = false;
  for (const auto& r : records) {
    const auto seed = static_cast<unsigned long long>(r.key.seed);
    if (!r.ok()) {
      hard = true;
      out.row(r.key.model, r.key.d1, r.key.d2, seed, "error", r.error);
    }
    if (r.over_budget) {
      out.row(r.key.model, r.key.d1, r.key.d2, seed, "time_budget",
              "run took " + csv::format_fixed(r.seconds, 1) + " s");
    }
    if (r.arm_clamped_rows > 0) {
      out.row(r.key.model, r.key.d1, r.key.d2, seed, "arm_clamped",
              std::to_string(r.arm_clamped_rows) + " awareness rows hit the exponent clamp");
    }
  }
  return hard;
}

/// MAE and RMSE per seed recomputed from one series CSV.
inline std::map<std::string, Metrics> metrics_from_series_file(const std::string& path) {
  std::map<std::string, ErrorPool> pools;
  csv::read_file(path, kSeriesHeader, [&](const std::vector<std::string>& f, std::size_t line) {
    const std::string where = path + ":" + std::to_string(line);
    pools[f[0]].add(csv::parse_double(f[5], where), csv::parse_double(f[6], where));
  });
  std::map<std::string, Metrics> out;
  for (const auto& [seed, pool] : pools) out[seed] = pool.metrics();
  return out;
}

}  // namespace epiwave::experiment
