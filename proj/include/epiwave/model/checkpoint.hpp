#pragma once

// A trained model on disk: DIR/params.json holds the tensors, DIR/model.json
// the model name, configuration, normalization stats, selected symptoms and
// district order, so a forecast needs nothing else.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "epiwave/core/tensor_set.hpp"
#include "epiwave/model/config.hpp"
#include "epiwave/model/data.hpp"

namespace epiwave::model {

namespace fs = std::filesystem;

inline nlohmann::json config_to_json(const ModelConfig& c) {
  return {{"l1", c.l1},
          {"l2", c.l2},
          {"hidden", c.hidden},
          {"k", c.k},
          {"gcn_width", c.gcn_width},
          {"d1", c.d1},
          {"d2", c.d2},
          {"dropout", c.dropout},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"seed", c.seed},
          {"variant", to_string(c.variant)},
          {"readout", to_string(c.readout)},
          {"lambda_init", c.lambda_init},
          {"adjacency_norm", wmn::to_string(c.adjacency_norm)},
          {"max_exponent", c.max_exponent}};
}

inline ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.l1 = j.at("l1");
  c.l2 = j.at("l2");
  c.hidden = j.at("hidden");
  c.k = j.at("k");
  c.gcn_width = j.at("gcn_width");
  c.d1 = j.at("d1");
  c.d2 = j.at("d2");
  c.dropout = j.at("dropout");
  c.epochs = j.at("epochs");
  c.batch_size = j.at("batch_size");
  c.learning_rate = j.at("learning_rate");
  c.seed = j.at("seed");
  c.variant = parse_variant(j.at("variant"));
  c.readout = parse_readout(j.at("readout"));
  c.lambda_init = j.at("lambda_init");
  c.adjacency_norm = wmn::parse_adjacency_norm(j.at("adjacency_norm"));
  c.max_exponent = j.at("max_exponent");
  return c;
}

inline nlohmann::json stats_to_json(const wmn::NormalizationStats& s) {
  auto matrix = [](const Matrix& m) {
    return nlohmann::json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.values()}};
  };
  return {{"search_min", matrix(s.search_min)},
          {"search_max", matrix(s.search_max)},
          {"case_min", s.case_min},
          {"case_max", s.case_max}};
}

inline wmn::NormalizationStats stats_from_json(const nlohmann::json& j) {
  auto matrix = [](const nlohmann::json& m) {
    return Matrix(m.at("rows").get<std::size_t>(), m.at("cols").get<std::size_t>(),
                  m.at("data").get<std::vector<double>>());
  };
  return {matrix(j.at("search_min")), matrix(j.at("search_max")),
          j.at("case_min").get<std::vector<double>>(), j.at("case_max").get<std::vector<double>>()};
}

struct Checkpoint {
  std::string model;  ///< registry name, e.g. "sabgnn" or "lstm_iw"
  ModelConfig config;
  wmn::NormalizationStats stats;
  std::vector<std::size_t> symptom_columns;
  std::vector<std::string> symptoms;   ///< names of the selected columns
  std::vector<std::string> districts;
  TensorSet params;
};

inline void save_checkpoint(const Checkpoint& c, const fs::path& dir) {
  fs::create_directories(dir);
  save_tensors(c.params, (dir / "params.json").string());
  const nlohmann::json side{{"format", "epiwave-model"},
                            {"version", kCheckpointVersion},
                            {"model", c.model},
                            {"config", config_to_json(c.config)},
                            {"stats", stats_to_json(c.stats)},
                            {"symptom_columns", c.symptom_columns},
                            {"symptoms", c.symptoms},
                            {"districts", c.districts}};
  std::ofstream out(dir / "model.json");
  if (!out) throw std::runtime_error("cannot write " + (dir / "model.json").string());
  out << side.dump(1) << '\n';
}

inline Checkpoint load_checkpoint(const fs::path& dir) {
  std::ifstream in(dir / "model.json");
  if (!in) throw std::runtime_error("cannot read " + (dir / "model.json").string());
  const auto j = nlohmann::json::parse(in);
  if (j.value("format", "") != "epiwave-model" || j.value("version", 0) != kCheckpointVersion) {
    throw std::runtime_error((dir / "model.json").string() + ": not a version " +
                             std::to_string(kCheckpointVersion) + " model sidecar");
  }
  Checkpoint c;
  c.model = j.at("model");
  c.config = config_from_json(j.at("config"));
  c.stats = stats_from_json(j.at("stats"));
  c.symptom_columns = j.at("symptom_columns").get<std::vector<std::size_t>>();
  c.symptoms = j.at("symptoms").get<std::vector<std::string>>();
  c.districts = j.at("districts").get<std::vector<std::string>>();
  c.params = load_tensors((dir / "params.json").string());
  return c;
}

}  // namespace epiwave::model
