#pragma once

#include <functional>

#include "padkit/tensor.hpp"

namespace padkit {

// A scalar-valued differentiable function together with its analytic
// gradient, as a pair of closures over the same point.
struct ScalarFn {
  std::function<double(const Tensor&)> value;
  std::function<Tensor(const Tensor&)> gradient;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_coordinate = 0;
  bool passed = false;
};

// Central finite differences per coordinate against the analytic gradient.
// Relative error denominator is max(|analytic|, |numeric|, 1e-8).
GradCheckReport check_gradient(const ScalarFn& fn, const Tensor& point,
                               double step, double tolerance);

}  // namespace padkit
