#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "epiwave/core/tensor_set.hpp"

namespace epiwave {

struct AdamOptions {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Thrown when a gradient carries NaN or Inf.
class NonFiniteGradient : public std::runtime_error {
 public:
  explicit NonFiniteGradient(const std::string& tensor)
      : std::runtime_error("non-finite gradient in parameter '" + tensor + "'"), tensor_(tensor) {}
  const std::string& tensor() const noexcept { return tensor_; }

 private:
  std::string tensor_;
};

/// Moment accumulators of Adam, one pair per named parameter.
class AdamState {
 public:
  AdamState() = default;
  AdamState(const TensorSet& params, AdamOptions options)
      : options_(options), first_(zeros_like(params)), second_(zeros_like(params)) {}

  const AdamOptions& options() const noexcept { return options_; }
  std::int64_t step_count() const noexcept { return step_; }
  const TensorSet& first_moment() const noexcept { return first_; }
  const TensorSet& second_moment() const noexcept { return second_; }

  /// One bias-corrected Adam update of `params` in place.
  void step(TensorSet& params, const TensorSet& grads) {
    if (!same_layout(params, grads) || !same_layout(params, first_)) {
      throw ShapeError("adam_step: gradients do not match parameter layout");
    }
    for (const auto& [name, g] : grads) {
      if (!g.all_finite()) throw NonFiniteGradient(name);
    }
    ++step_;
    const double b1 = options_.beta1, b2 = options_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
    for (auto& [name, p] : params) {
      const auto& g = grads.at(name).values();
      auto& m = first_.at(name).values();
      auto& v = second_.at(name).values();
      auto& w = p.values();
      for (std::size_t i = 0; i < w.size(); ++i) {
        m[i] = b1 * m[i] + (1.0 - b1) * g[i];
        v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
        const double mhat = m[i] / c1;
        const double vhat = v[i] / c2;
        w[i] -= options_.learning_rate * mhat / (std::sqrt(vhat) + options_.epsilon);
      }
    }
  }

 private:
  AdamOptions options_;
  TensorSet first_;
  TensorSet second_;
  std::int64_t step_ = 0;
};

}  // namespace epiwave
