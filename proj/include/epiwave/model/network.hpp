#pragma once

// Forecaster interface shared by SAB-GNN and the recurrent baselines, and
// the SAB-GNN wiring: GCN over each input day, awareness recovery, case
// concatenation, then a stacked LSTM (or a flat perceptron for `wt`).

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "epiwave/core/lstm.hpp"
#include "epiwave/core/tape.hpp"
#include "epiwave/core/tensor_set.hpp"
#include "epiwave/model/config.hpp"
#include "epiwave/model/data.hpp"
#include "epiwave/util/rng.hpp"

namespace epiwave::model {

using ParamVars = std::map<std::string, ad::Var>;

/// splitmix64 step, used to give each consumer of a run seed its own stream.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Inverted dropout; inactive when built without a generator.
class Dropout {
 public:
  Dropout() = default;
  Dropout(Rng& rng, double rate) : rng_(&rng), rate_(rate) {}

  bool active() const noexcept { return rng_ != nullptr && rate_ > 0.0; }

  ad::Var apply(ad::Var x) const {
    if (!active()) return x;
    Matrix mask(x.rows(), x.cols());
    const double keep = 1.0 - rate_;
    for (double& m : mask.values()) m = rng_->uniform() < keep ? 1.0 / keep : 0.0;
    return ad::hadamard(x, x.tape().constant(std::move(mask)));
  }

 private:
  Rng* rng_ = nullptr;
  double rate_ = 0.0;
};

struct ForwardDiagnostics {
  std::size_t arm_clamped_rows = 0;
};

class Forecaster {
 public:
  virtual ~Forecaster() = default;
  virtual std::string name() const = 0;
  virtual const ModelConfig& config() const = 0;
  virtual TensorSet init_params(std::size_t n, std::size_t k) const = 0;
  /// Parameters held fixed during training; they receive zero gradient.
  virtual std::set<std::string> frozen() const { return {}; }
  /// Normalized forecasts of one window, n x D2.
  virtual ad::Var forward(ad::Tape& tape, const ParamVars& p, const PreparedSeries& data,
                          const wmn::TrainingWindow& w, const Dropout& dropout,
                          ForwardDiagnostics* diag = nullptr) const = 0;
};

// ---- shared building blocks ------------------------------------------------

/// Uniform in +-1/sqrt(fan_in).
inline Matrix uniform_init(std::size_t rows, std::size_t cols, std::size_t fan_in, Rng& rng) {
  const double r = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.uniform(-r, r);
  return m;
}

inline void add_lstm_params(TensorSet& p, const std::string& prefix, std::size_t in,
                            std::size_t hidden, int layers, Rng& rng) {
  for (int l = 0; l < layers; ++l) {
    const std::string base = prefix + ".l" + std::to_string(l);
    const std::size_t width = l == 0 ? in : hidden;
    p[base + ".wx"] = uniform_init(width, 4 * hidden, width, rng);
    p[base + ".wh"] = uniform_init(hidden, 4 * hidden, hidden, rng);
    p[base + ".b"] = Matrix(1, 4 * hidden);
  }
}

inline void add_readout_params(TensorSet& p, const std::string& prefix, std::size_t in,
                               std::size_t out, Rng& rng) {
  p[prefix + ".w"] = uniform_init(in, out, in, rng);
  p[prefix + ".b"] = Matrix(1, out);
}

inline const ad::Var& param(const ParamVars& p, const std::string& name) {
  auto it = p.find(name);
  if (it == p.end()) throw std::invalid_argument("missing parameter '" + name + "'");
  return it->second;
}

/// Stacked LSTM with dropout on the outputs passed between layers.
class LstmStack {
 public:
  LstmStack(const ParamVars& p, const std::string& prefix, int layers) {
    for (int l = 0; l < layers; ++l) {
      const std::string base = prefix + ".l" + std::to_string(l);
      layers_.push_back({param(p, base + ".wx"), param(p, base + ".wh"), param(p, base + ".b")});
    }
  }

  std::size_t hidden() const { return layers_.front().wh.rows(); }
  std::size_t input_width() const { return layers_.front().wx.rows(); }

  std::vector<ad::LstmState> zero_states(ad::Tape& t, std::size_t rows) const {
    return std::vector<ad::LstmState>(layers_.size(), ad::zero_state(t, rows, hidden()));
  }

  /// One time step through every layer; returns the top hidden state.
  ad::Var step(ad::Var x, std::vector<ad::LstmState>& states, const Dropout& dropout) const {
    ad::Var in = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      if (l > 0) in = dropout.apply(in);
      states[l] = ad::lstm_step(in, states[l], layers_[l]);
      in = states[l].h;
    }
    return in;
  }

 private:
  std::vector<ad::LstmWeights> layers_;
};

inline ad::Var perceptron(const ParamVars& p, const std::string& prefix, ad::Var x) {
  return ad::add_bias(ad::matmul(x, param(p, prefix + ".w")), param(p, prefix + ".b"));
}

/// Runs the stack over `inputs`, then produces D2 outputs: either by rolling
/// D2 more zero-input steps with the perceptron applied per step, or by
/// mapping the last hidden state to all D2 values at once.
inline ad::Var recurrent_forecast(ad::Tape& t, const ParamVars& p, const LstmStack& stack,
                                  const std::vector<ad::Var>& inputs, int d2, Readout readout,
                                  const Dropout& dropout, const std::string& readout_prefix) {
  const std::size_t rows = inputs.front().rows();
  auto states = stack.zero_states(t, rows);
  ad::Var top;
  for (const auto& x : inputs) top = stack.step(x, states, dropout);
  if (readout == Readout::direct) return perceptron(p, readout_prefix, dropout.apply(top));
  const ad::Var zero = t.constant(Matrix(rows, stack.input_width()));
  std::vector<ad::Var> outs;
  for (int j = 0; j < d2; ++j) {
    top = stack.step(zero, states, dropout);
    outs.push_back(perceptron(p, readout_prefix, dropout.apply(top)));
  }
  return ad::concat_cols(outs);
}

// ---- SAB-GNN -----------------------------------------------------------------

/// X^(k+1) = ReLU(A X^(k) W^(k)), starting from the day's search features.
inline ad::Var spatial_forward(ad::Var adjacency, ad::Var features, const ParamVars& p, int layers) {
  ad::Var x = features;
  for (int l = 0; l < layers; ++l)
    x = ad::relu(ad::matmul(ad::matmul(adjacency, x), param(p, "gcn.w" + std::to_string(l))));
  return x;
}

/// Row i scaled by exp(lambda_i^2 * elapsed).
inline ad::Var awareness_recovery(ad::Var spatial, ad::Var lambda, double elapsed,
                                  double max_exponent = 50.0, std::size_t* clamped = nullptr) {
  if (elapsed < 0.0) throw std::invalid_argument("awareness_recovery: day precedes the series origin");
  return ad::row_scale_exp(spatial, lambda, elapsed, max_exponent, clamped);
}

/// [recovered search embedding | normalized cases] per district.
inline ad::Var concat_features(ad::Var recovered, ad::Var cases) {
  return ad::concat_cols({recovered, cases});
}

class SabGnn final : public Forecaster {
 public:
  explicit SabGnn(ModelConfig cfg) : cfg_(std::move(cfg)) {}

  std::string name() const override {
    return cfg_.variant == Variant::full ? "sabgnn" : "sabgnn_" + to_string(cfg_.variant);
  }
  const ModelConfig& config() const override { return cfg_; }

  std::set<std::string> frozen() const override {
    if (cfg_.variant == Variant::wsa) return {"awareness.lambda"};
    return {};
  }

  std::size_t embedding_width() const {
    return cfg_.variant == Variant::ws ? static_cast<std::size_t>(cfg_.k)
                                       : static_cast<std::size_t>(cfg_.spatial_width());
  }

  TensorSet init_params(std::size_t n, std::size_t k) const override {
    cfg_.validate(k);
    if (static_cast<std::size_t>(cfg_.k) != k) {
      throw std::invalid_argument("SAB-GNN: data has " + std::to_string(k) + " symptom columns, config k=" +
                                  std::to_string(cfg_.k));
    }
    Rng rng(derive_seed(cfg_.seed, 0));
    TensorSet p;
    if (cfg_.variant != Variant::ws) {
      std::size_t in = k;
      const auto g = static_cast<std::size_t>(cfg_.spatial_width());
      for (int l = 0; l < cfg_.l1; ++l) {
        p["gcn.w" + std::to_string(l)] = uniform_init(in, g, in, rng);
        in = g;
      }
    }
    p["awareness.lambda"] =
        Matrix(n, 1, cfg_.variant == Variant::wsa ? 0.0 : cfg_.lambda_init);
    const std::size_t feat = embedding_width() + 1;
    const auto h = static_cast<std::size_t>(cfg_.hidden);
    const auto d2 = static_cast<std::size_t>(cfg_.d2);
    if (cfg_.variant == Variant::wt) {
      add_readout_params(p, "wt", feat * static_cast<std::size_t>(cfg_.d1), d2, rng);
    } else {
      add_lstm_params(p, "lstm", feat, h, cfg_.l2, rng);
      add_readout_params(p, "readout", h, cfg_.readout == Readout::rollout ? 1 : d2, rng);
    }
    return p;
  }

  /// Per-day [recovered search | cases] rows for the window's input days.
  std::vector<ad::Var> day_features(ad::Tape& t, const ParamVars& p, const PreparedSeries& data,
                                    const wmn::TrainingWindow& w, ForwardDiagnostics* diag) const {
    std::vector<ad::Var> out;
    for (auto day = w.first_input(); day <= w.last_input(); ++day) {
      const auto d = static_cast<std::size_t>(day);
      const ad::Var h = t.constant(data.search.at(d));
      ad::Var hs = h;
      if (cfg_.variant != Variant::ws) hs = spatial_forward(t.constant(data.adjacency.at(d)), h, p, cfg_.l1);
      ad::Var recovered = hs;
      if (cfg_.variant != Variant::wsa) {
        std::size_t clamped = 0;
        recovered = awareness_recovery(hs, param(p, "awareness.lambda"), static_cast<double>(day),
                                       cfg_.max_exponent, &clamped);
        if (diag) diag->arm_clamped_rows += clamped;
      }
      out.push_back(concat_features(recovered, t.constant(data.cases.at(d))));
    }
    return out;
  }

  ad::Var forward(ad::Tape& t, const ParamVars& p, const PreparedSeries& data,
                  const wmn::TrainingWindow& w, const Dropout& dropout,
                  ForwardDiagnostics* diag = nullptr) const override {
    if (w.d1 != cfg_.d1 || w.d2 != cfg_.d2) throw std::invalid_argument("SAB-GNN: window shape differs from config");
    const auto features = day_features(t, p, data, w, diag);
    if (cfg_.variant == Variant::wt) {
      return perceptron(p, "wt", dropout.apply(ad::concat_cols(features)));
    }
    const LstmStack stack(p, "lstm", cfg_.l2);
    return recurrent_forecast(t, p, stack, features, cfg_.d2, cfg_.readout, dropout, "readout");
  }

 private:
  ModelConfig cfg_;
};

}  // namespace epiwave::model
