#pragma once

#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "epiwave/core/matrix.hpp"

namespace epiwave {

/// Named tensors, iterated in name order. Holds model parameters and their
/// gradients alike.
using TensorSet = std::map<std::string, Matrix>;

/// Same names and shapes on both sides.
inline bool same_layout(const TensorSet& a, const TensorSet& b) {
  if (a.size() != b.size()) return false;
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first || !ia->second.same_shape(ib->second)) return false;
  }
  return true;
}

inline TensorSet zeros_like(const TensorSet& s) {
  TensorSet out;
  for (const auto& [name, m] : s) out.emplace(name, Matrix(m.rows(), m.cols()));
  return out;
}

inline constexpr int kCheckpointVersion = 1;

inline nlohmann::json tensors_to_json(const TensorSet& tensors) {
  nlohmann::json j;
  j["format"] = "epiwave-tensors";
  j["version"] = kCheckpointVersion;
  auto& arr = j["tensors"] = nlohmann::json::array();
  for (const auto& [name, m] : tensors) {
    arr.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}, {"data", m.values()}});
  }
  return j;
}

inline TensorSet tensors_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "epiwave-tensors") {
    throw std::runtime_error("checkpoint: not an epiwave tensor file");
  }
  const int version = j.value("version", 0);
  if (version != kCheckpointVersion) {
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  }
  TensorSet out;
  for (const auto& t : j.at("tensors")) {
    const auto name = t.at("name").get<std::string>();
    Matrix m(t.at("rows").get<std::size_t>(), t.at("cols").get<std::size_t>(),
             t.at("data").get<std::vector<double>>());
    if (!out.emplace(name, std::move(m)).second) {
      throw std::runtime_error("checkpoint: duplicate tensor '" + name + "'");
    }
  }
  return out;
}

inline void save_tensors(const TensorSet& tensors, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << tensors_to_json(tensors).dump(1) << '\n';
}

inline TensorSet load_tensors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return tensors_from_json(nlohmann::json::parse(in));
}

}  // namespace epiwave
