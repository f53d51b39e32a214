#pragma once

// The experiment commands behind the CLI. Each writes its CSVs under the
// configured output directory and reports whether any run hit a hard error.

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "epiwave/experiment/report.hpp"

namespace epiwave::experiment {

struct CommandResult {
  std::vector<RunRecord> records;
  bool hard_failure = false;
};

inline fs::path checkpoint_dir(const ExperimentConfig& c, const RunKey& k) {
  return fs::path(c.out_dir) / "checkpoints" / run_label(k);
}

/// summary-style CSV, series files, relative errors, training log, failures.
inline bool write_grid_reports(const fs::path& out, const std::string& stem, const std::vector<RunRecord>& records,
                               const wmn::SnapshotSeries& series) {
  fs::create_directories(out);
  {
    csv::Writer summary((out / (stem + ".csv")).string(), kSummaryHeader);
    write_metric_rows(summary, records);
  }
  const std::string pre = stem == "summary" ? "" : stem + "_";
  write_series_files(out / (pre + "series"), records, series);
  write_relative_errors((out / (pre + "relative_error.csv")).string(), records, series);
  write_training_log((out / (pre + "training_log.csv")).string(), records);
  return write_failures((out / (pre + "failures.csv")).string(), records);
}

/// Trains every configured model on every scenario and seed, saves
/// checkpoints and writes the reports.
inline CommandResult command_train(const ExperimentConfig& c, std::ostream* log = nullptr) {
  const auto series = load_series(c);
  CommandResult res;
  res.records = run_grid(c, series, c.models, c.scenarios, c.model, log);
  if (c.save_checkpoints)
    for (const auto& r : res.records)
      if (r.checkpoint) model::save_checkpoint(*r.checkpoint, checkpoint_dir(c, r.key));
  res.hard_failure = write_grid_reports(c.out_dir, "summary", res.records, series);
  return res;
}

/// Scores the checkpoints saved by `train` (historical averages are
/// recomputed) and rewrites the summary, series and relative-error reports.
inline CommandResult command_evaluate(const ExperimentConfig& c, std::ostream* log = nullptr) {
  const auto series = load_series(c);
  for (const auto& m : c.models) require_known_model(m);
  CommandResult res;
  DataCache cache(series);
  for (const auto& name : c.models)
    for (auto [d1, d2] : c.scenarios) {
      const auto split = split_series(series.size(), d1, d2, c.split);
      for (auto seed : c.seeds) {
        model::ModelConfig cfg = c.model;
        cfg.d1 = d1;
        cfg.d2 = d2;
        cfg.seed = seed;
        RunRecord r;
        if (is_historical_average(name)) {
          r = run_one(name, cfg, series, split, cache, c);
        } else {
          const RunKey key{name, d1, d2, seed};
          try {
            r = evaluate_checkpoint(model::load_checkpoint(checkpoint_dir(c, key)), seed, series, split);
          } catch (const std::exception& e) {
            r.key = key;
            r.error = e.what();
          }
        }
        log_run(log, r);
        res.records.push_back(std::move(r));
      }
    }
  fs::create_directories(c.out_dir);
  {
    csv::Writer summary((fs::path(c.out_dir) / "summary.csv").string(), kSummaryHeader);
    write_metric_rows(summary, res.records);
  }
  write_series_files(fs::path(c.out_dir) / "series", res.records, series);
  write_relative_errors((fs::path(c.out_dir) / "relative_error.csv").string(), res.records, series);
  res.hard_failure = write_failures((fs::path(c.out_dir) / "failures.csv").string(), res.records);
  return res;
}

/// The SAB-GNN variants side by side: ablation.csv and friends.
inline CommandResult command_ablate(const ExperimentConfig& c, std::ostream* log = nullptr) {
  const auto series = load_series(c);
  CommandResult res;
  res.records = run_grid(c, series, c.ablation_models, c.scenarios, c.model, log);
  res.hard_failure = write_grid_reports(c.out_dir, "ablation", res.records, series);
  return res;
}

/// One-at-a-time sweeps of k, L1, L2 (on the first scenario) and of the
/// (D1, D2) scenario itself, for the sweep model. Writes sweep.csv.
inline CommandResult command_sweep(const ExperimentConfig& c, std::ostream* log = nullptr) {
  const auto series = load_series(c);
  CommandResult res;
  std::vector<std::pair<std::vector<std::string>, std::vector<RunRecord>>> groups;
  auto sweep_int = [&](const std::string& param, const std::vector<long long>& values, auto set) {
    for (auto v : values) {
      model::ModelConfig cfg = c.model;
      set(cfg, static_cast<int>(v));
      if (log) *log << "sweep " << param << "=" << v << '\n';
      groups.push_back({{param, std::to_string(v)}, run_grid(c, series, {c.sweep_model}, {c.scenarios.front()}, cfg, log)});
    }
  };
  sweep_int("k", c.sweep_k, [](model::ModelConfig& m, int v) { m.k = v; });
  sweep_int("l1", c.sweep_l1, [](model::ModelConfig& m, int v) { m.l1 = v; });
  sweep_int("l2", c.sweep_l2, [](model::ModelConfig& m, int v) { m.l2 = v; });
  for (auto [d1, d2] : c.sweep_scenarios) {
    if (log) *log << "sweep scenario=" << d1 << "/" << d2 << '\n';
    groups.push_back({{"scenario", std::to_string(d1) + "/" + std::to_string(d2)},
                      run_grid(c, series, {c.sweep_model}, {{d1, d2}}, c.model, log)});
  }
  fs::create_directories(c.out_dir);
  csv::Writer out((fs::path(c.out_dir) / "sweep.csv").string(),
                  std::string("parameter,value,") + kSummaryHeader);
  for (auto& [prefix, records] : groups) {
    write_metric_rows(out, records, prefix);
    for (auto& r : records) res.records.push_back(std::move(r));
  }
  res.hard_failure = write_failures((fs::path(c.out_dir) / "sweep_failures.csv").string(), res.records);
  return res;
}

}  // namespace epiwave::experiment
