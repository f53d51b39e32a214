#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "epiwave/citysim/config.hpp"
#include "epiwave/citysim/simulate.hpp"
#include "epiwave/experiment/split.hpp"
#include "epiwave/model/config.hpp"
#include "epiwave/util/flat_config.hpp"
#include "epiwave/wmn/series_io.hpp"

namespace epiwave::experiment {

using Scenario = std::pair<int, int>;  ///< (D1, D2)

struct ExperimentConfig {
  std::string data_dir;     ///< snapshot series written by `preprocess`
  std::string city_config;  ///< or: simulate this city in memory
  std::string out_dir = "reports";
  std::vector<Scenario> scenarios{{21, 7}, {21, 14}, {21, 21}};
  std::vector<std::string> models{"sabgnn", "sabgnn_wsa", "ha_all",   "ha_window",
                                  "lstm_i", "lstm_iw",    "seq2seq_i", "seq2seq_iw"};
  std::vector<std::uint64_t> seeds{0, 1, 2};
  SplitOptions split;
  int ha_window = 0;  ///< days averaged by ha_window; 0 means D1
  /// Candidate learning rates; each run keeps the one with the lowest
  /// validation loss. Empty means the model learning rate alone.
  std::vector<double> learning_rates;
  model::ModelConfig model;  ///< template; D1, D2, seed and variant are set per run
  std::vector<std::string> ablation_models{"sabgnn", "sabgnn_wsa", "sabgnn_wt", "sabgnn_ws"};
  std::string sweep_model = "sabgnn";
  std::vector<long long> sweep_k, sweep_l1, sweep_l2;
  std::vector<Scenario> sweep_scenarios;
  double time_budget_minutes = 20.0;
  bool save_checkpoints = true;

  std::vector<double> candidate_learning_rates() const {
    return learning_rates.empty() ? std::vector<double>{model.learning_rate} : learning_rates;
  }

  static ExperimentConfig from_flat(const FlatConfig& f) {
    ExperimentConfig c;
    c.data_dir = f.string("data", c.data_dir);
    c.city_config = f.string("city", c.city_config);
    c.out_dir = f.string("out", c.out_dir);
    auto scenarios = [&](const std::string& key, std::vector<Scenario> fallback) {
      std::vector<std::pair<long long, long long>> raw;
      for (auto [a, b] : fallback) raw.emplace_back(a, b);
      std::vector<Scenario> out;
      for (auto [a, b] : f.integer_pairs(key, raw)) out.emplace_back(static_cast<int>(a), static_cast<int>(b));
      return out;
    };
    c.scenarios = scenarios("scenarios", c.scenarios);
    c.models = f.strings("models", c.models);
    std::vector<long long> seeds;
    for (auto s : c.seeds) seeds.push_back(static_cast<long long>(s));
    c.seeds.clear();
    for (auto s : f.integers("seeds", seeds)) {
      if (s < 0) throw ConfigError("seeds must be nonnegative");
      c.seeds.push_back(static_cast<std::uint64_t>(s));
    }
    c.split.train_ratio = f.number("train_ratio", c.split.train_ratio);
    c.split.val_ratio = f.number("val_ratio", c.split.val_ratio);
    c.split.test_ratio = f.number("test_ratio", c.split.test_ratio);
    c.ha_window = static_cast<int>(f.integer("ha_window", c.ha_window));
    c.learning_rates = f.numbers("learning_rates", c.learning_rates);

    auto& m = c.model;
    m.l1 = static_cast<int>(f.integer("l1", m.l1));
    m.l2 = static_cast<int>(f.integer("l2", m.l2));
    m.hidden = static_cast<int>(f.integer("hidden", m.hidden));
    m.k = static_cast<int>(f.integer("k", m.k));
    m.gcn_width = static_cast<int>(f.integer("gcn_width", m.gcn_width));
    m.dropout = f.number("dropout", m.dropout);
    m.epochs = static_cast<int>(f.integer("epochs", m.epochs));
    m.batch_size = static_cast<int>(f.integer("batch_size", m.batch_size));
    m.learning_rate = f.number("learning_rate", m.learning_rate);
    m.readout = model::parse_readout(f.string("readout", model::to_string(m.readout)));
    m.lambda_init = f.number("lambda_init", m.lambda_init);
    m.adjacency_norm = wmn::parse_adjacency_norm(f.string("adjacency_norm", wmn::to_string(m.adjacency_norm)));
    m.max_exponent = f.number("max_exponent", m.max_exponent);

    c.ablation_models = f.strings("ablation_models", c.ablation_models);
    c.sweep_model = f.string("sweep_model", c.sweep_model);
    c.sweep_k = f.integers("sweep_k", c.sweep_k);
    c.sweep_l1 = f.integers("sweep_l1", c.sweep_l1);
    c.sweep_l2 = f.integers("sweep_l2", c.sweep_l2);
    c.sweep_scenarios = scenarios("sweep_scenarios", c.sweep_scenarios);
    c.time_budget_minutes = f.number("time_budget_minutes", c.time_budget_minutes);
    c.save_checkpoints = f.boolean("save_checkpoints", c.save_checkpoints);

    const auto unused = f.unused_keys();
    if (!unused.empty()) throw ConfigError("experiment config: unknown key '" + unused.front() + "'");
    c.validate();
    return c;
  }

  static ExperimentConfig load(const std::string& path) { return from_flat(FlatConfig::load(path)); }

  void validate() const {
    if (data_dir.empty() == city_config.empty()) {
      throw ConfigError("experiment config: set exactly one of 'data' and 'city'");
    }
    if (scenarios.empty()) throw ConfigError("experiment config: no scenarios");
    if (seeds.empty()) throw ConfigError("experiment config: no seeds");
    for (auto [d1, d2] : scenarios)
      if (d1 < 1 || d2 < 1) throw ConfigError("experiment config: scenario days must be positive");
    for (double lr : learning_rates)
      if (!(lr > 0.0)) throw ConfigError("experiment config: learning rates must be positive");
    if (!(time_budget_minutes > 0.0)) throw ConfigError("experiment config: time budget must be positive");
    (void)split_series(1000000, 1, 1, split);  // ratio checks
  }
};

/// The snapshot series an experiment runs on.
inline wmn::SnapshotSeries load_series(const ExperimentConfig& c) {
  if (!c.data_dir.empty()) return wmn::read_series(c.data_dir);
  const auto city = citysim::CityConfig::from_flat(FlatConfig::load(c.city_config));
  return citysim::simulate(city, [](const citysim::DailyRecords&) {}).series;
}

}  // namespace epiwave::experiment
