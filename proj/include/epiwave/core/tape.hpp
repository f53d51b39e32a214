#pragma once

// Reverse-mode differentiation over the handful of matrix primitives the
// forecaster needs. Every primitive records its output value and a closure
// that pushes the output gradient back to its inputs.

#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

#include "epiwave/core/matrix.hpp"

namespace epiwave::ad {

class Tape;

/// Handle to a value recorded on a Tape.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::size_t index) : tape_(tape), index_(index) {}

  bool valid() const noexcept { return tape_ != nullptr; }
  Tape& tape() const noexcept { return *tape_; }
  std::size_t index() const noexcept { return index_; }
  inline const Matrix& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }

 private:
  Tape* tape_ = nullptr;
  std::size_t index_ = 0;
};

class Tape {
 public:
  using Backward = std::function<void(Tape&, const Matrix& out_grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Leaf that never receives a gradient.
  Var constant(Matrix value) { return push(std::move(value), false, {}); }

  /// Leaf whose gradient is collected by backward().
  Var variable(Matrix value) { return push(std::move(value), true, {}); }

  const Matrix& value(Var v) const { return nodes_.at(v.index()).value; }
  const Matrix& value(std::size_t i) const { return nodes_[i].value; }
  bool requires_grad(Var v) const { return nodes_.at(v.index()).requires_grad; }
  bool requires_grad(std::size_t i) const { return nodes_[i].requires_grad; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Gradient of the last backward() target w.r.t. v; zeros if v did not
  /// influence it.
  Matrix grad(Var v) const {
    const Node& n = nodes_.at(v.index());
    if (n.grad.empty()) return Matrix(n.value.rows(), n.value.cols());
    return n.grad;
  }

  /// Records an op output. `parents` decides whether the output needs a
  /// gradient; `fn` is dropped when none of them does.
  Var record(Matrix value, std::initializer_list<Var> parents, Backward fn) {
    bool needs = false;
    for (const Var& p : parents) needs = needs || nodes_[p.index()].requires_grad;
    return push(std::move(value), needs, needs ? std::move(fn) : Backward{});
  }
  Var record(Matrix value, std::span<const Var> parents, Backward fn) {
    bool needs = false;
    for (const Var& p : parents) needs = needs || nodes_[p.index()].requires_grad;
    return push(std::move(value), needs, needs ? std::move(fn) : Backward{});
  }

  /// Accumulation slot for the gradient of node i, allocated on first use.
  Matrix& grad_slot(std::size_t i) {
    Node& n = nodes_[i];
    if (n.grad.empty()) n.grad = Matrix(n.value.rows(), n.value.cols());
    return n.grad;
  }

  void backward(Var loss) {
    const Node& l = nodes_.at(loss.index());
    if (l.value.rows() != 1 || l.value.cols() != 1) {
      throw ShapeError("backward: loss must be 1x1, got " + l.value.shape());
    }
    for (Node& n : nodes_) n.grad = Matrix();
    grad_slot(loss.index())(0, 0) = 1.0;
    for (std::size_t i = loss.index() + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (!n.backward || n.grad.empty()) continue;
      n.backward(*this, n.grad);
    }
  }

  void clear() noexcept { nodes_.clear(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    Backward backward;
  };

  Var push(Matrix value, bool needs, Backward fn) {
    nodes_.push_back(Node{std::move(value), Matrix(), needs, std::move(fn)});
    return Var(this, nodes_.size() - 1);
  }

  std::vector<Node> nodes_;
};

inline const Matrix& Var::value() const { return tape_->value(index_); }

namespace detail {

inline void accumulate(Tape& t, Var v, const Matrix& g) {
  if (!t.requires_grad(v)) return;
  Matrix& slot = t.grad_slot(v.index());
  auto& s = slot.values();
  const auto& gv = g.values();
  for (std::size_t i = 0; i < s.size(); ++i) s[i] += gv[i];
}

inline Tape& same_tape(Var a, Var b) {
  if (&a.tape() != &b.tape()) throw std::logic_error("ad: operands live on different tapes");
  return a.tape();
}

}  // namespace detail

inline Var matmul(Var a, Var b) {
  Tape& t = detail::same_tape(a, b);
  Matrix out = epiwave::matmul(a.value(), b.value());
  return t.record(std::move(out), {a, b}, [a, b](Tape& t, const Matrix& g) {
    if (t.requires_grad(a)) detail::accumulate(t, a, matmul_nt(g, t.value(b)));
    if (t.requires_grad(b)) detail::accumulate(t, b, matmul_tn(t.value(a), g));
  });
}

inline Var add(Var a, Var b) {
  Tape& t = detail::same_tape(a, b);
  Matrix::require_same_shape(a.value(), b.value(), "add");
  Matrix out = a.value() + b.value();
  return t.record(std::move(out), {a, b}, [a, b](Tape& t, const Matrix& g) {
    detail::accumulate(t, a, g);
    detail::accumulate(t, b, g);
  });
}

inline Var sub(Var a, Var b) {
  Tape& t = detail::same_tape(a, b);
  Matrix::require_same_shape(a.value(), b.value(), "sub");
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] -= b.value().values()[i];
  return t.record(std::move(out), {a, b}, [a, b](Tape& t, const Matrix& g) {
    detail::accumulate(t, a, g);
    detail::accumulate(t, b, g * -1.0);
  });
}

/// a (n x m) plus a 1 x m bias broadcast over rows.
inline Var add_bias(Var a, Var bias) {
  Tape& t = detail::same_tape(a, bias);
  const Matrix& av = a.value();
  const Matrix& bv = bias.value();
  if (bv.rows() != 1 || bv.cols() != av.cols()) {
    throw ShapeError("add_bias: bias " + bv.shape() + " does not fit " + av.shape());
  }
  Matrix out = av;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += bv(0, j);
  return t.record(std::move(out), {a, bias}, [a, bias](Tape& t, const Matrix& g) {
    detail::accumulate(t, a, g);
    if (t.requires_grad(bias)) {
      Matrix& slot = t.grad_slot(bias.index());
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) slot(0, j) += g(i, j);
    }
  });
}

inline Var hadamard(Var a, Var b) {
  Tape& t = detail::same_tape(a, b);
  Matrix::require_same_shape(a.value(), b.value(), "hadamard");
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] *= b.value().values()[i];
  return t.record(std::move(out), {a, b}, [a, b](Tape& t, const Matrix& g) {
    if (t.requires_grad(a)) {
      Matrix ga = g;
      for (std::size_t i = 0; i < ga.size(); ++i) ga.values()[i] *= t.value(b).values()[i];
      detail::accumulate(t, a, ga);
    }
    if (t.requires_grad(b)) {
      Matrix gb = g;
      for (std::size_t i = 0; i < gb.size(); ++i) gb.values()[i] *= t.value(a).values()[i];
      detail::accumulate(t, b, gb);
    }
  });
}

inline Var scale(Var a, double s) {
  Tape& t = a.tape();
  return t.record(a.value() * s, {a},
                  [a, s](Tape& t, const Matrix& g) { detail::accumulate(t, a, g * s); });
}

/// max(0, x); the subgradient at 0 is 0.
inline Var relu(Var a) {
  Tape& t = a.tape();
  Matrix out = a.value();
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return t.record(std::move(out), {a}, [a](Tape& t, const Matrix& g) {
    Matrix ga = g;
    const auto& x = t.value(a).values();
    for (std::size_t i = 0; i < ga.size(); ++i)
      if (!(x[i] > 0.0)) ga.values()[i] = 0.0;
    detail::accumulate(t, a, ga);
  });
}

inline Var sigmoid(Var a) {
  Tape& t = a.tape();
  Matrix out = a.value();
  for (double& v : out.values()) v = 1.0 / (1.0 + std::exp(-v));
  const std::size_t yi = t.size();
  return t.record(std::move(out), {a}, [a, yi](Tape& t, const Matrix& g) {
    Matrix ga = g;
    const auto& y = t.value(yi).values();
    for (std::size_t i = 0; i < ga.size(); ++i) ga.values()[i] *= y[i] * (1.0 - y[i]);
    detail::accumulate(t, a, ga);
  });
}

inline Var tanh(Var a) {
  Tape& t = a.tape();
  Matrix out = a.value();
  for (double& v : out.values()) v = std::tanh(v);
  const std::size_t yi = t.size();
  return t.record(std::move(out), {a}, [a, yi](Tape& t, const Matrix& g) {
    Matrix ga = g;
    const auto& y = t.value(yi).values();
    for (std::size_t i = 0; i < ga.size(); ++i) ga.values()[i] *= 1.0 - y[i] * y[i];
    detail::accumulate(t, a, ga);
  });
}

/// Horizontal concatenation; all parts share the row count.
inline Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no operands");
  Tape& t = parts.front().tape();
  const std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  for (const Var& p : parts) {
    if (&p.tape() != &t) throw std::logic_error("ad: operands live on different tapes");
    if (p.rows() != rows) {
      throw ShapeError("concat_cols: row mismatch " + parts.front().value().shape() + " vs " +
                       p.value().shape());
    }
    cols += p.cols();
  }
  Matrix out(rows, cols);
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const Matrix& v = p.value();
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < v.cols(); ++j) out(i, offset + j) = v(i, j);
    offset += v.cols();
  }
  std::vector<Var> owned(parts.begin(), parts.end());
  return t.record(std::move(out), parts, [owned](Tape& t, const Matrix& g) {
    std::size_t offset = 0;
    for (const Var& p : owned) {
      const std::size_t c = t.value(p).cols();
      if (t.requires_grad(p)) {
        Matrix& slot = t.grad_slot(p.index());
        for (std::size_t i = 0; i < g.rows(); ++i)
          for (std::size_t j = 0; j < c; ++j) slot(i, j) += g(i, offset + j);
      }
      offset += c;
    }
  });
}

inline Var concat_cols(std::initializer_list<Var> parts) {
  return concat_cols(std::span<const Var>(parts.begin(), parts.size()));
}

/// Columns [begin, begin + count) of a.
inline Var slice_cols(Var a, std::size_t begin, std::size_t count) {
  Tape& t = a.tape();
  const Matrix& v = a.value();
  if (begin + count > v.cols()) {
    throw ShapeError("slice_cols: [" + std::to_string(begin) + ", " +
                     std::to_string(begin + count) + ") out of range for " + v.shape());
  }
  Matrix out(v.rows(), count);
  for (std::size_t i = 0; i < v.rows(); ++i)
    for (std::size_t j = 0; j < count; ++j) out(i, j) = v(i, begin + j);
  return t.record(std::move(out), {a}, [a, begin, count](Tape& t, const Matrix& g) {
    Matrix& slot = t.grad_slot(a.index());
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < count; ++j) slot(i, begin + j) += g(i, j);
  });
}

/// Rows picked by index, in the given order.
inline Var select_rows(Var a, std::vector<std::size_t> rows) {
  Tape& t = a.tape();
  const Matrix& v = a.value();
  Matrix out(rows.size(), v.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= v.rows()) {
      throw ShapeError("select_rows: row " + std::to_string(rows[r]) + " out of range for " +
                       v.shape());
    }
    for (std::size_t j = 0; j < v.cols(); ++j) out(r, j) = v(rows[r], j);
  }
  return t.record(std::move(out), {a}, [a, rows = std::move(rows)](Tape& t, const Matrix& g) {
    Matrix& slot = t.grad_slot(a.index());
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t j = 0; j < g.cols(); ++j) slot(rows[r], j) += g(r, j);
  });
}

/// Row i of x multiplied by exp(min(rate_i^2 * elapsed, max_exponent)), with
/// rate an n x 1 column. A clamped row passes no gradient to its rate.
/// `clamped`, when given, receives the number of clamped rows.
inline Var row_scale_exp(Var x, Var rate, double elapsed, double max_exponent,
                         std::size_t* clamped = nullptr) {
  Tape& t = detail::same_tape(x, rate);
  const Matrix& xv = x.value();
  const Matrix& rv = rate.value();
  if (rv.rows() != xv.rows() || rv.cols() != 1) {
    throw ShapeError("row_scale_exp: rate " + rv.shape() + " does not fit " + xv.shape());
  }
  std::vector<double> factor(xv.rows());
  std::vector<char> saturated(xv.rows(), 0);
  std::size_t n_clamped = 0;
  for (std::size_t i = 0; i < xv.rows(); ++i) {
    double e = rv(i, 0) * rv(i, 0) * elapsed;
    if (e > max_exponent) {
      e = max_exponent;
      saturated[i] = 1;
      ++n_clamped;
    }
    factor[i] = std::exp(e);
  }
  if (clamped) *clamped = n_clamped;
  Matrix out = xv;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) *= factor[i];
  return t.record(std::move(out), {x, rate},
                  [x, rate, elapsed, factor = std::move(factor),
                   saturated = std::move(saturated)](Tape& t, const Matrix& g) {
                    if (t.requires_grad(x)) {
                      Matrix& slot = t.grad_slot(x.index());
                      for (std::size_t i = 0; i < g.rows(); ++i)
                        for (std::size_t j = 0; j < g.cols(); ++j) slot(i, j) += g(i, j) * factor[i];
                    }
                    if (t.requires_grad(rate)) {
                      Matrix& slot = t.grad_slot(rate.index());
                      const Matrix& xv = t.value(x);
                      const Matrix& rv = t.value(rate);
                      for (std::size_t i = 0; i < g.rows(); ++i) {
                        if (saturated[i]) continue;
                        double s = 0.0;
                        for (std::size_t j = 0; j < g.cols(); ++j) s += g(i, j) * xv(i, j);
                        slot(i, 0) += s * factor[i] * 2.0 * rv(i, 0) * elapsed;
                      }
                    }
                  });
}

/// Sum of all entries, as a 1 x 1 value.
inline Var sum(Var a) {
  Tape& t = a.tape();
  return t.record(Matrix(1, 1, a.value().sum()), {a}, [a](Tape& t, const Matrix& g) {
    const Matrix& v = t.value(a);
    detail::accumulate(t, a, Matrix(v.rows(), v.cols(), g(0, 0)));
  });
}

/// Mean squared difference over all entries, as a 1 x 1 value.
inline Var mse(Var prediction, Var target) {
  Tape& t = detail::same_tape(prediction, target);
  const Matrix& p = prediction.value();
  const Matrix& y = target.value();
  Matrix::require_same_shape(p, y, "mse");
  if (p.empty()) throw ShapeError("mse: empty operands");
  const double n = static_cast<double>(p.size());
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p.values()[i] - y.values()[i];
    s += d * d;
  }
  return t.record(Matrix(1, 1, s / n), {prediction, target},
                  [prediction, target, n](Tape& t, const Matrix& g) {
                    const Matrix& p = t.value(prediction);
                    const Matrix& y = t.value(target);
                    Matrix d(p.rows(), p.cols());
                    for (std::size_t i = 0; i < p.size(); ++i)
                      d.values()[i] = 2.0 * (p.values()[i] - y.values()[i]) / n * g(0, 0);
                    detail::accumulate(t, prediction, d);
                    if (t.requires_grad(target)) detail::accumulate(t, target, d * -1.0);
                  });
}

}  // namespace epiwave::ad
