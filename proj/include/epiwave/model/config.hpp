#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "epiwave/wmn/normalize.hpp"

namespace epiwave::model {

enum class Variant { full, wsa, wt, ws };
enum class Readout { rollout, direct };

inline Variant parse_variant(const std::string& s) {
  if (s == "full") return Variant::full;
  if (s == "wsa") return Variant::wsa;
  if (s == "wt") return Variant::wt;
  if (s == "ws") return Variant::ws;
  throw std::invalid_argument("unknown model variant '" + s + "' (expected full, wsa, wt or ws)");
}

inline std::string to_string(Variant v) {
  switch (v) {
    case Variant::full: return "full";
    case Variant::wsa: return "wsa";
    case Variant::wt: return "wt";
    case Variant::ws: return "ws";
  }
  return "?";
}

inline Readout parse_readout(const std::string& s) {
  if (s == "rollout") return Readout::rollout;
  if (s == "direct") return Readout::direct;
  throw std::invalid_argument("unknown readout '" + s + "' (expected rollout or direct)");
}

inline std::string to_string(Readout r) { return r == Readout::rollout ? "rollout" : "direct"; }

struct ModelConfig {
  int l1 = 1;                ///< GCN layers
  int l2 = 2;                ///< stacked LSTM layers
  int hidden = 10;           ///< LSTM hidden size
  int k = 8;                 ///< most frequent symptoms kept
  int gcn_width = 0;         ///< GCN output width; 0 means k
  int d1 = 21;
  int d2 = 7;
  double dropout = 0.5;
  int epochs = 100;
  int batch_size = 8;
  double learning_rate = 1e-4;
  std::uint64_t seed = 0;
  Variant variant = Variant::full;
  Readout readout = Readout::rollout;
  double lambda_init = 0.01;
  wmn::AdjacencyNorm adjacency_norm = wmn::AdjacencyNorm::column;
  double max_exponent = 50.0;  ///< clamp on lambda^2 * elapsed days

  int spatial_width() const { return gcn_width > 0 ? gcn_width : k; }

  void validate(std::size_t n_words) const {
    auto fail = [](const std::string& m) { throw std::invalid_argument("model config: " + m); };
    if (l1 < 1 || l2 < 1) fail("L1 and L2 must be at least 1");
    if (hidden < 1) fail("hidden size must be positive");
    if (k < 1 || static_cast<std::size_t>(k) > n_words) {
      fail("k=" + std::to_string(k) + " outside [1, " + std::to_string(n_words) + "]");
    }
    if (gcn_width < 0) fail("gcn_width must be nonnegative");
    if (d1 < 1 || d2 < 1) fail("D1 and D2 must be positive");
    if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must lie in [0, 1)");
    if (epochs < 1 || batch_size < 1) fail("epochs and batch size must be positive");
    if (!(learning_rate > 0.0)) fail("learning rate must be positive");
    if (!(max_exponent > 0.0)) fail("max_exponent must be positive");
  }
};

}  // namespace epiwave::model
