#pragma once

// Per-district recurrent baselines on cases alone (I) or cases plus the
// selected symptom searches (I+W). No spatial mixing, no awareness recovery.

#include <string>
#include <vector>

#include "epiwave/model/network.hpp"

namespace epiwave::baselines {

enum class Features { cases, cases_and_search };

class LstmBaseline final : public model::Forecaster {
 public:
  LstmBaseline(model::ModelConfig cfg, Features f) : cfg_(std::move(cfg)), features_(f) {}

  std::string name() const override { return features_ == Features::cases ? "lstm_i" : "lstm_iw"; }
  const model::ModelConfig& config() const override { return cfg_; }

  TensorSet init_params(std::size_t, std::size_t k) const override {
    cfg_.validate(k);
    Rng rng(model::derive_seed(cfg_.seed, 0));
    TensorSet p;
    const auto h = static_cast<std::size_t>(cfg_.hidden);
    model::add_lstm_params(p, "lstm", input_width(k), h, cfg_.l2, rng);
    model::add_readout_params(p, "readout", h,
                              cfg_.readout == model::Readout::rollout ? 1 : static_cast<std::size_t>(cfg_.d2), rng);
    return p;
  }

  ad::Var forward(ad::Tape& t, const model::ParamVars& p, const model::PreparedSeries& data,
                  const wmn::TrainingWindow& w, const model::Dropout& dropout,
                  model::ForwardDiagnostics* = nullptr) const override {
    const model::LstmStack stack(p, "lstm", cfg_.l2);
    return model::recurrent_forecast(t, p, stack, inputs(t, data, w, features_), w.d2, cfg_.readout,
                                     dropout, "readout");
  }

  std::size_t input_width(std::size_t k) const { return features_ == Features::cases ? 1 : k + 1; }

  static std::vector<ad::Var> inputs(ad::Tape& t, const model::PreparedSeries& data,
                                     const wmn::TrainingWindow& w, Features f) {
    std::vector<ad::Var> out;
    for (auto day = w.first_input(); day <= w.last_input(); ++day) {
      const auto d = static_cast<std::size_t>(day);
      const ad::Var c = t.constant(data.cases.at(d));
      out.push_back(f == Features::cases ? c : ad::concat_cols({t.constant(data.search.at(d)), c}));
    }
    return out;
  }

 private:
  model::ModelConfig cfg_;
  Features features_;
};

/// Encoder LSTM over the D1 inputs; a separate decoder LSTM starts from the
/// encoder's final states and runs D2 zero-input steps, each read out by a
/// shared perceptron.
class Seq2SeqBaseline final : public model::Forecaster {
 public:
  Seq2SeqBaseline(model::ModelConfig cfg, Features f) : cfg_(std::move(cfg)), features_(f) {}

  std::string name() const override { return features_ == Features::cases ? "seq2seq_i" : "seq2seq_iw"; }
  const model::ModelConfig& config() const override { return cfg_; }

  TensorSet init_params(std::size_t, std::size_t k) const override {
    cfg_.validate(k);
    Rng rng(model::derive_seed(cfg_.seed, 0));
    TensorSet p;
    const auto h = static_cast<std::size_t>(cfg_.hidden);
    model::add_lstm_params(p, "encoder", features_ == Features::cases ? 1 : k + 1, h, cfg_.l2, rng);
    model::add_lstm_params(p, "decoder", 1, h, cfg_.l2, rng);
    model::add_readout_params(p, "readout", h, 1, rng);
    return p;
  }

  std::vector<ad::LstmState> encode(ad::Tape& t, const model::ParamVars& p, const std::vector<ad::Var>& xs,
                                    const model::Dropout& dropout) const {
    const model::LstmStack enc(p, "encoder", cfg_.l2);
    auto states = enc.zero_states(t, xs.front().rows());
    for (const auto& x : xs) enc.step(x, states, dropout);
    return states;
  }

  ad::Var decode(ad::Tape& t, const model::ParamVars& p, std::vector<ad::LstmState> states, int d2,
                 const model::Dropout& dropout) const {
    const model::LstmStack dec(p, "decoder", cfg_.l2);
    const ad::Var zero = t.constant(Matrix(states.front().h.rows(), 1));
    std::vector<ad::Var> outs;
    for (int j = 0; j < d2; ++j) {
      const ad::Var top = dec.step(zero, states, dropout);
      outs.push_back(model::perceptron(p, "readout", dropout.apply(top)));
    }
    return ad::concat_cols(outs);
  }

  ad::Var forward(ad::Tape& t, const model::ParamVars& p, const model::PreparedSeries& data,
                  const wmn::TrainingWindow& w, const model::Dropout& dropout,
                  model::ForwardDiagnostics* = nullptr) const override {
    return decode(t, p, encode(t, p, LstmBaseline::inputs(t, data, w, features_), dropout), w.d2, dropout);
  }

 private:
  model::ModelConfig cfg_;
  Features features_;
};

}  // namespace epiwave::baselines
