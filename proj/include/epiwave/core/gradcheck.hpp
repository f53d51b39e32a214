#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "epiwave/core/tensor_set.hpp"

namespace epiwave {

/// Loss callback for gradient checking. Must return the loss at `params`
/// and, when `grads` is non-null, fill it with the analytic gradient.
using LossWithGrad = std::function<double(const TensorSet& params, TensorSet* grads)>;

struct TensorCheck {
  std::string name;
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  bool passed = true;
};

struct GradCheckReport {
  std::vector<TensorCheck> tensors;
  double tolerance = 0.0;

  bool passed() const {
    return std::all_of(tensors.begin(), tensors.end(), [](const TensorCheck& t) { return t.passed; });
  }
  const TensorCheck* find(const std::string& name) const {
    for (const auto& t : tensors)
      if (t.name == name) return &t;
    return nullptr;
  }
};

class NondeterministicLoss : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GradCheckOptions {
  double step = 1e-5;
  /// Denominator floor of the relative error. Entries whose analytic and
  /// numeric gradients are both below it are compared in absolute terms.
  double magnitude_floor = 1e-6;
};

/// Compares analytic gradients with central finite differences, entry by
/// entry, and reports the worst relative error per tensor.
inline GradCheckReport finite_diff_check(const LossWithGrad& loss_fn, const TensorSet& params,
                                         double tolerance, GradCheckOptions options = {}) {
  TensorSet analytic = zeros_like(params);
  const double base = loss_fn(params, &analytic);
  const double again = loss_fn(params, nullptr);
  if (base != again) {
    throw NondeterministicLoss("finite_diff_check: two forward passes disagree (" +
                               std::to_string(base) + " vs " + std::to_string(again) + ")");
  }
  if (!same_layout(analytic, params)) {
    throw ShapeError("finite_diff_check: gradient layout differs from parameters");
  }

  GradCheckReport report;
  report.tolerance = tolerance;
  TensorSet probe = params;
  for (auto& [name, tensor] : probe) {
    TensorCheck check{name};
    auto& w = tensor.values();
    const auto& a = analytic.at(name).values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double orig = w[i];
      w[i] = orig + options.step;
      const double up = loss_fn(probe, nullptr);
      w[i] = orig - options.step;
      const double down = loss_fn(probe, nullptr);
      w[i] = orig;
      const double numeric = (up - down) / (2.0 * options.step);
      const double denom = std::max({std::abs(a[i]), std::abs(numeric), options.magnitude_floor});
      const double rel = std::abs(a[i] - numeric) / denom;
      if (!(rel <= check.max_relative_error)) {
        check.max_relative_error = rel;
        check.worst_index = i;
      }
    }
    check.passed = check.max_relative_error <= tolerance;
    report.tensors.push_back(check);
  }
  return report;
}

}  // namespace epiwave
