#pragma once

#include <functional>

namespace mmseb {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  unsigned max_depth = 20;
};

/// Adaptive Gauss-Kronrod integral of f over [lower, upper]. Either endpoint
/// may be infinite. Throws ToleranceNotMet when the error estimate exceeds
/// max(abs_tol, rel_tol * |I|) after max_depth bisections.
double integrate_1d(const std::function<double(double)>& f, double lower, double upper,
                    const QuadratureOptions& options = {});

inline double integrate_1d(const std::function<double(double)>& f, double lower, double upper,
                           double abs_tol, double rel_tol) {
  return integrate_1d(f, lower, upper, QuadratureOptions{abs_tol, rel_tol});
}

}  // namespace mmseb
