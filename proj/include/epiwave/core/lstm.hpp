#pragma once

// Standard LSTM cell on the tape. Rows are independent sequences sharing
// one set of weights; gates are packed as [input | forget | candidate | output].

#include <string>
#include <vector>

#include "epiwave/core/tape.hpp"

namespace epiwave::ad {

struct LstmWeights {
  Var wx;  ///< in x 4h
  Var wh;  ///< h x 4h
  Var b;   ///< 1 x 4h
};

struct LstmState {
  Var h;
  Var c;
};

inline LstmState lstm_step(Var x, const LstmState& s, const LstmWeights& w) {
  const std::size_t h = w.wh.rows();
  if (w.wh.cols() != 4 * h || w.wx.cols() != 4 * h || w.b.cols() != 4 * h) {
    throw ShapeError("lstm_step: gate weights must have 4h columns, h = " + std::to_string(h));
  }
  const Var gates = add_bias(add(matmul(x, w.wx), matmul(s.h, w.wh)), w.b);
  const Var i = sigmoid(slice_cols(gates, 0, h));
  const Var f = sigmoid(slice_cols(gates, h, h));
  const Var g = tanh(slice_cols(gates, 2 * h, h));
  const Var o = sigmoid(slice_cols(gates, 3 * h, h));
  const Var c = add(hadamard(f, s.c), hadamard(i, g));
  return {hadamard(o, tanh(c)), c};
}

inline LstmState zero_state(Tape& t, std::size_t rows, std::size_t hidden) {
  return {t.constant(Matrix(rows, hidden)), t.constant(Matrix(rows, hidden))};
}

}  // namespace epiwave::ad
