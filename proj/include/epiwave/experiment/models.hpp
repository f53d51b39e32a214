#pragma once

#include <memory>
#include <string>
#include <vector>

#include "epiwave/baselines/recurrent.hpp"
#include "epiwave/model/network.hpp"

namespace epiwave::experiment {

inline const std::vector<std::string>& known_models() {
  static const std::vector<std::string> names{"sabgnn",  "sabgnn_wsa", "sabgnn_wt", "sabgnn_ws",
                                              "ha_all",  "ha_window",  "lstm_i",    "lstm_iw",
                                              "seq2seq_i", "seq2seq_iw"};
  return names;
}

inline bool is_historical_average(const std::string& name) {
  return name == "ha_all" || name == "ha_window";
}

inline void require_known_model(const std::string& name) {
  for (const auto& k : known_models())
    if (k == name) return;
  std::string list;
  for (const auto& k : known_models()) list += (list.empty() ? "" : ", ") + k;
  throw std::invalid_argument("unknown model '" + name + "' (known: " + list + ")");
}

/// Trainable model for a registry name; null for the historical averages.
inline std::unique_ptr<model::Forecaster> make_forecaster(const std::string& name, model::ModelConfig cfg) {
  require_known_model(name);
  using baselines::Features;
  if (name.rfind("sabgnn", 0) == 0) {
    cfg.variant = name == "sabgnn" ? model::Variant::full : model::parse_variant(name.substr(7));
    return std::make_unique<model::SabGnn>(cfg);
  }
  if (name == "lstm_i") return std::make_unique<baselines::LstmBaseline>(cfg, Features::cases);
  if (name == "lstm_iw") return std::make_unique<baselines::LstmBaseline>(cfg, Features::cases_and_search);
  if (name == "seq2seq_i") return std::make_unique<baselines::Seq2SeqBaseline>(cfg, Features::cases);
  if (name == "seq2seq_iw") return std::make_unique<baselines::Seq2SeqBaseline>(cfg, Features::cases_and_search);
  return nullptr;
}

}  // namespace epiwave::experiment
