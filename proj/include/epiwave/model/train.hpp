#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "epiwave/core/adam.hpp"
#include "epiwave/model/network.hpp"

namespace epiwave::model {

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;  ///< NaN when there are no validation windows
  bool operator==(const EpochLog&) const = default;
};

struct TrainResult {
  TensorSet params;  ///< from the epoch with the lowest validation loss
  std::vector<EpochLog> log;
  int best_epoch = 0;
  std::size_t arm_clamped_rows = 0;
};

/// Raised when the loss or a gradient stops being finite.
class TrainingAborted : public std::runtime_error {
 public:
  TrainingAborted(int epoch, int batch, const std::string& what)
      : std::runtime_error("training aborted at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch) + ": " + what),
        epoch_(epoch),
        batch_(batch) {}
  int epoch() const noexcept { return epoch_; }
  int batch() const noexcept { return batch_; }

 private:
  int epoch_, batch_;
};

inline ParamVars bind_params(ad::Tape& t, const TensorSet& params, const std::set<std::string>& frozen) {
  ParamVars vars;
  for (const auto& [name, m] : params) vars.emplace(name, frozen.count(name) ? t.constant(m) : t.variable(m));
  return vars;
}

/// Loss of one batch accumulated as a running mean over its windows, with
/// gradients written to `grads` when given.
inline double batch_loss(const Forecaster& model, const TensorSet& params, const PreparedSeries& data,
                         std::span<const wmn::TrainingWindow> windows, const Dropout& dropout,
                         TensorSet* grads, ForwardDiagnostics* diag = nullptr) {
  ad::Tape tape;
  const auto vars = bind_params(tape, params, model.frozen());
  ad::Var loss = tape.constant(Matrix(1, 1));
  for (std::size_t m = 1; m <= windows.size(); ++m) {
    const auto& w = windows[m - 1];
    const ad::Var pred = model.forward(tape, vars, data, w, dropout, diag);
    const ad::Var lt = ad::mse(pred, tape.constant(data.targets(w)));
    const double md = static_cast<double>(m);
    loss = ad::add(ad::scale(loss, (md - 1.0) / md), ad::scale(lt, 1.0 / md));
  }
  if (grads) {
    tape.backward(loss);
    grads->clear();
    for (const auto& [name, v] : vars) (*grads)[name] = tape.grad(v);
  }
  return loss.value()(0, 0);
}

/// Mean evaluation-mode loss over windows.
inline double evaluate_loss(const Forecaster& model, const TensorSet& params, const PreparedSeries& data,
                            std::span<const wmn::TrainingWindow> windows) {
  if (windows.empty()) return std::numeric_limits<double>::quiet_NaN();
  double total = 0.0;
  for (const auto& w : windows) total += batch_loss(model, params, data, {&w, 1}, Dropout{}, nullptr);
  return total / static_cast<double>(windows.size());
}

/// Mini-batch Adam over shuffled training windows; keeps the parameters of
/// the epoch with the lowest validation loss (training loss when there is
/// no validation set).
inline TrainResult train(const Forecaster& model, const PreparedSeries& data,
                         std::vector<wmn::TrainingWindow> train_windows,
                         const std::vector<wmn::TrainingWindow>& val_windows) {
  const ModelConfig& cfg = model.config();
  if (train_windows.empty()) throw std::invalid_argument("train: no training windows");
  TrainResult res;
  TensorSet params = model.init_params(data.n(), data.k());
  AdamState adam(params, AdamOptions{cfg.learning_rate});
  Rng shuffle_rng(derive_seed(cfg.seed, 1));
  Rng dropout_rng(derive_seed(cfg.seed, 2));
  const Dropout dropout(dropout_rng, cfg.dropout);
  double best = std::numeric_limits<double>::infinity();
  TensorSet grads;
  ForwardDiagnostics diag;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<wmn::TrainingWindow>(train_windows));
    double weighted = 0.0;
    int batch = 0;
    for (std::size_t b = 0; b < train_windows.size(); b += static_cast<std::size_t>(cfg.batch_size)) {
      ++batch;
      const std::size_t len = std::min<std::size_t>(static_cast<std::size_t>(cfg.batch_size),
                                                    train_windows.size() - b);
      const double l = batch_loss(model, params, data, {train_windows.data() + b, len}, dropout, &grads, &diag);
      if (!std::isfinite(l)) throw TrainingAborted(epoch, batch, "loss is not finite");
      try {
        adam.step(params, grads);
      } catch (const NonFiniteGradient& e) {
        throw TrainingAborted(epoch, batch, e.what());
      }
      weighted += l * static_cast<double>(len);
    }
    EpochLog log{epoch, weighted / static_cast<double>(train_windows.size()),
                 evaluate_loss(model, params, data, val_windows)};
    res.log.push_back(log);
    const double score = val_windows.empty() ? log.train_loss : log.val_loss;
    if (score < best) {
      best = score;
      res.best_epoch = epoch;
      res.params = params;
    }
  }
  if (res.params.empty()) {  // every score was NaN
    res.params = params;
    res.best_epoch = cfg.epochs;
  }
  res.arm_clamped_rows = diag.arm_clamped_rows;
  return res;
}

/// Evaluation-mode normalized forecast, n x D2.
inline Matrix predict_normalized(const Forecaster& model, const TensorSet& params,
                                 const PreparedSeries& data, const wmn::TrainingWindow& w) {
  ad::Tape tape;
  const auto vars = bind_params(tape, params, model.frozen());
  return model.forward(tape, vars, data, w, Dropout{}).value();
}

/// Forecast in case counts: denormalized per district and floored at zero.
inline Matrix to_counts(const Matrix& normalized, const wmn::NormalizationStats& stats) {
  Matrix out(normalized.rows(), normalized.cols());
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j)
      out(i, j) = std::max(0.0, stats.case_count(i, normalized(i, j)));
  return out;
}

inline Matrix predict(const Forecaster& model, const TensorSet& params, const PreparedSeries& data,
                      const wmn::TrainingWindow& w) {
  return to_counts(predict_normalized(model, params, data, w), data.stats);
}

}  // namespace epiwave::model
