#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "epiwave/baselines/historical_average.hpp"
#include "epiwave/experiment/config.hpp"
#include "epiwave/experiment/metrics.hpp"
#include "epiwave/experiment/models.hpp"
#include "epiwave/model/checkpoint.hpp"
#include "epiwave/model/train.hpp"

namespace epiwave::experiment {

struct RunKey {
  std::string model;
  int d1 = 0;
  int d2 = 0;
  std::uint64_t seed = 0;
};

/// Training history of one learning-rate candidate.
struct CandidateLog {
  double learning_rate = 0.0;
  std::vector<model::EpochLog> log;
  int best_epoch = 0;
  double score = 0.0;  ///< lowest validation loss (training loss without validation)
  bool selected = false;
};

struct RunRecord {
  RunKey key;
  Metrics metrics;
  double seconds = 0.0;
  std::vector<wmn::TrainingWindow> windows;
  std::vector<Matrix> predicted, actual;  ///< per test window, n x D2 counts
  std::vector<CandidateLog> training;
  std::optional<model::Checkpoint> checkpoint;
  std::size_t arm_clamped_rows = 0;
  std::string error;  ///< hard failure message
  bool over_budget = false;

  bool ok() const noexcept { return error.empty(); }
};

/// Prepared model inputs, shared by every run with the same split and k.
class DataCache {
 public:
  explicit DataCache(const wmn::SnapshotSeries& series) : series_(series) {}

  const model::PreparedSeries& get(const Split& split, int d1, int d2, int k, wmn::AdjacencyNorm norm) {
    const auto key = std::make_tuple(d1, d2, k, static_cast<int>(norm));
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      it = cache_.emplace(key, model::prepare_series(series_, split.fit_days(), static_cast<std::size_t>(k), norm)).first;
    }
    return it->second;
  }

 private:
  const wmn::SnapshotSeries& series_;
  std::map<std::tuple<int, int, int, int>, model::PreparedSeries> cache_;
};

inline Matrix actual_counts(const wmn::SnapshotSeries& series, const wmn::TrainingWindow& w) {
  Matrix out(series.n(), static_cast<std::size_t>(w.d2));
  for (int j = 0; j < w.d2; ++j) {
    const auto& c = series[static_cast<std::size_t>(w.first_target() + j)].cases;
    for (std::size_t i = 0; i < series.n(); ++i) out(i, static_cast<std::size_t>(j)) = static_cast<double>(c[i]);
  }
  return out;
}

inline void score_test_windows(RunRecord& r, const wmn::SnapshotSeries& series, const Split& split,
                               const std::function<Matrix(const wmn::TrainingWindow&)>& forecast) {
  for (const auto& w : split.test) {
    r.windows.push_back(w);
    r.predicted.push_back(forecast(w));
    r.actual.push_back(actual_counts(series, w));
  }
  r.metrics = evaluate(r.predicted, r.actual);
}

inline model::Checkpoint make_checkpoint(const std::string& name, const model::ModelConfig& cfg,
                                         const model::PreparedSeries& data, const wmn::SnapshotSeries& series,
                                         TensorSet params) {
  model::Checkpoint c{name, cfg, data.stats, data.symptoms, {}, series.districts(), std::move(params)};
  for (auto s : data.symptoms) c.symptoms.push_back(series.symptoms()[s]);
  return c;
}

/// Trains (or, for historical averages, just applies) one model on one
/// scenario with one seed and scores it on the test windows. Errors are
/// captured in the record.
inline RunRecord run_one(const std::string& name, model::ModelConfig cfg, const wmn::SnapshotSeries& series,
                         const Split& split, DataCache& cache, const ExperimentConfig& exp) {
  RunRecord r;
  r.key = {name, cfg.d1, cfg.d2, cfg.seed};
  const auto start = std::chrono::steady_clock::now();
  try {
    if (is_historical_average(name)) {
      const int x = exp.ha_window > 0 ? exp.ha_window : cfg.d1;
      score_test_windows(r, series, split, [&](const wmn::TrainingWindow& w) {
        return name == "ha_all" ? baselines::ha_all(series, w.anchor, w.d2)
                                : baselines::ha_window(series, w.anchor, x, w.d2);
      });
    } else {
      const auto& data = cache.get(split, cfg.d1, cfg.d2, cfg.k, cfg.adjacency_norm);
      std::optional<model::TrainResult> best;
      std::size_t best_index = 0;
      for (double lr : exp.candidate_learning_rates()) {
        cfg.learning_rate = lr;
        const auto m = make_forecaster(name, cfg);
        auto res = model::train(*m, data, split.train, split.validation);
        CandidateLog log{lr, res.log, res.best_epoch, std::numeric_limits<double>::infinity(), false};
        for (const auto& e : res.log) {
          const double s = split.validation.empty() ? e.train_loss : e.val_loss;
          if (s < log.score) log.score = s;
        }
        r.arm_clamped_rows += res.arm_clamped_rows;
        if (!best || log.score < r.training[best_index].score) {
          best = std::move(res);
          best_index = r.training.size();
        }
        r.training.push_back(std::move(log));
      }
      r.training[best_index].selected = true;
      cfg.learning_rate = r.training[best_index].learning_rate;
      const auto m = make_forecaster(name, cfg);
      score_test_windows(r, series, split, [&](const wmn::TrainingWindow& w) {
        return model::predict(*m, best->params, data, w);
      });
      r.checkpoint = make_checkpoint(name, cfg, data, series, std::move(best->params));
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.over_budget = r.seconds > exp.time_budget_minutes * 60.0;
  return r;
}

/// Re-scores a saved model on the test windows of its scenario.
inline RunRecord evaluate_checkpoint(const model::Checkpoint& c, std::uint64_t seed,
                                     const wmn::SnapshotSeries& series, const Split& split) {
  RunRecord r;
  r.key = {c.model, c.config.d1, c.config.d2, seed};
  const auto start = std::chrono::steady_clock::now();
  try {
    if (c.districts != series.districts()) throw std::invalid_argument("checkpoint districts differ from the data");
    const auto data = model::prepare_series(series, c.stats, c.symptom_columns, c.config.adjacency_norm);
    const auto m = make_forecaster(c.model, c.config);
    score_test_windows(r, series, split,
                       [&](const wmn::TrainingWindow& w) { return model::predict(*m, c.params, data, w); });
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline std::string run_label(const RunKey& k) {
  return k.model + "_d1-" + std::to_string(k.d1) + "_d2-" + std::to_string(k.d2) + "_seed-" +
         std::to_string(k.seed);
}

inline void log_run(std::ostream* log, const RunRecord& r) {
  if (!log) return;
  *log << run_label(r.key) << ": ";
  if (!r.ok()) {
    *log << "FAILED " << r.error << '\n';
    return;
  }
  *log << "MAE " << r.metrics.mae << " RMSE " << r.metrics.rmse << " (" << r.seconds << " s)";
  if (r.over_budget) *log << " over time budget";
  *log << '\n';
}

/// Every model x scenario x seed run, model-major.
inline std::vector<RunRecord> run_grid(const ExperimentConfig& exp, const wmn::SnapshotSeries& series,
                                       const std::vector<std::string>& models,
                                       const std::vector<Scenario>& scenarios,
                                       const model::ModelConfig& base, std::ostream* log = nullptr) {
  for (const auto& m : models) require_known_model(m);
  DataCache cache(series);
  std::vector<Split> splits;
  for (auto [d1, d2] : scenarios) splits.push_back(split_series(series.size(), d1, d2, exp.split));
  std::vector<RunRecord> out;
  for (const auto& name : models)
    for (std::size_t s = 0; s < scenarios.size(); ++s)
      for (auto seed : exp.seeds) {
        model::ModelConfig cfg = base;
        cfg.d1 = scenarios[s].first;
        cfg.d2 = scenarios[s].second;
        cfg.seed = seed;
        out.push_back(run_one(name, cfg, series, splits[s], cache, exp));
        log_run(log, out.back());
      }
  return out;
}

}  // namespace epiwave::experiment
