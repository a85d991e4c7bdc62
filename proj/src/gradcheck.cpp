#include "padkit/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace padkit {

GradCheckReport check_gradient(const ScalarFn& fn, const Tensor& point, double step,
                               double tolerance) {
  const Tensor analytic = fn.gradient(point);
  GradCheckReport report;
  Tensor probe = point;
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + step;
    const double fp = fn.value(probe);
    probe[i] = saved - step;
    const double fm = fn.value(probe);
    probe[i] = saved;
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw EvaluationError("non-finite function value during gradient check at coordinate " +
                            std::to_string(i));
    }
    const double numeric = (fp - fm) / (2.0 * step);
    const double denom = std::max({std::fabs(analytic[i]), std::fabs(numeric), 1e-8});
    const double rel = std::fabs(analytic[i] - numeric) / denom;
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_coordinate = i;
    }
  }
  report.passed = report.max_rel_error <= tolerance;
  return report;
}

}  // namespace padkit
