#include "mmseb/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mmseb/errors.hpp"

namespace mmseb {

// Infinite endpoints are handled by Boost's gauss_kronrod, which maps
// (-inf, inf) through x = t / (1 - t^2) and half-lines through
// x = a + t / (1 - t) before bisecting on the finite interval.
double integrate_1d(const std::function<double(double)>& f, double lower, double upper,
                    const QuadratureOptions& options) {
  if (std::isnan(lower) || std::isnan(upper)) throw InvalidArgument("NaN integration limit");
  if (lower == upper) return 0.0;
  if (lower > upper) return -integrate_1d(f, upper, lower, options);
  double error = 0.0;
  double l1 = 0.0;
  const double tol = std::max(options.rel_tol, 1e-15);
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, lower, upper, options.max_depth, tol, &error, &l1);
  if (!std::isfinite(value)) throw ToleranceNotMet("integral is not finite");
  const double target = std::max(options.abs_tol, options.rel_tol * std::abs(value));
  if (error > target)
    throw ToleranceNotMet("error estimate " + std::to_string(error) + " exceeds " +
                          std::to_string(target));
  return value;
}

}  // namespace mmseb
