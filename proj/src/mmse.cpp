#include "mmseb/mmse.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>

#include "mmseb/errors.hpp"
#include "mmseb/quadrature.hpp"

namespace mmseb {
namespace {

// Consecutive rejections tolerated within one draw before giving up.
constexpr std::size_t kMaxConsecutiveRejections = 1'000;

void check_rejection_rate(std::size_t rejections, std::size_t n) {
  const double rate = static_cast<double>(rejections) / static_cast<double>(n + rejections);
  if (rate > kMaxRankRejectionRate)
    throw RankDeficiencyRate("J_y T(Y) was rank deficient in " + std::to_string(rejections) +
                             " of " + std::to_string(n + rejections) + " draws");
}

}  // namespace

McEstimate mmse_classical_mc(const JointModel& joint, const McOptions& options,
                             const ClassicalOptions& classical) {
  if (classical.route == ConditionalMeanRoute::kTweedie && !joint.has_closed_form())
    throw UnsupportedStrategy("Tweedie route needs a closed-form marginal");
  std::atomic<std::size_t> rejections{0};
  auto draw = [&](Rng& rng) {
    for (std::size_t attempt = 0; attempt < kMaxConsecutiveRejections; ++attempt) {
      auto [x, y] = joint.sample(rng);
      if (classical.route == ConditionalMeanRoute::kImportance) {
        const auto est = cond_mean_importance(joint, y, classical.n_importance, rng);
        return (x - est.mean).squaredNorm();
      }
      if (!has_full_column_rank(joint.channel().jacobian_T(y))) {
        rejections.fetch_add(1, std::memory_order_relaxed);
        continue;
      }
      return (x - cond_mean_tweedie(joint, y)).squaredNorm();
    }
    throw RankDeficiencyRate("no full-rank draw after repeated attempts");
  };
  const auto estimate = mc_mean(draw, options.n, options.seed, options.workers);
  check_rejection_rate(rejections.load(), options.n);
  return estimate;
}

Theorem1Estimate mmse_theorem1_mc(const JointModel& joint, const McOptions& options) {
  if (!joint.has_closed_form())
    throw UnsupportedStrategy("the score estimator needs a closed-form marginal");
  std::atomic<std::size_t> rejections{0};
  auto draw = [&](Rng& rng) {
    for (std::size_t attempt = 0; attempt < kMaxConsecutiveRejections; ++attempt) {
      auto [x, y] = joint.sample(rng);
      const Matrix jac = joint.channel().jacobian_T(y);
      if (!has_full_column_rank(jac)) {
        rejections.fetch_add(1, std::memory_order_relaxed);
        continue;
      }
      return (left_pseudo_inverse(jac) * grad_y_info_density(joint, x, y)).squaredNorm();
    }
    throw RankDeficiencyRate("no full-rank draw after repeated attempts");
  };
  const auto estimate = mc_mean(draw, options.n, options.seed, options.workers);
  check_rejection_rate(rejections.load(), options.n);
  return {estimate, rejections.load()};
}

double mmse_gaussian_closed_form(const Matrix& covariance, double noise_variance) {
  if (!(noise_variance > 0.0)) throw InvalidArgument("noise variance must be positive");
  require_psd(covariance);
  const Eigen::Index k = covariance.rows();
  const Matrix a = Matrix::Identity(k, k) + covariance / noise_variance;
  return a.ldlt().solve(covariance).trace();
}

double mmse_bpsk(double noise_variance) {
  if (!(noise_variance > 0.0)) throw InvalidArgument("noise variance must be positive");
  const double snr = 1.0 / noise_variance;
  const double inv_sd = std::sqrt(snr);
  auto integrand = [&](double y) {
    return std::exp(-0.5 * y * y) / std::sqrt(2.0 * std::numbers::pi) *
           std::tanh(snr - y * inv_sd);
  };
  const double integral =
      integrate_1d(integrand, -std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::infinity(), QuadratureOptions{1e-9, 1e-12});
  return std::clamp(1.0 - integral, 0.0, 1.0);
}

double mmse_gamma_example(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) throw InvalidArgument("shape and rate must be positive");
  return shape * (shape + 1.0) / (rate * rate * (shape + 1.5));
}

GammaExampleTerms gamma_example_terms(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) throw InvalidArgument("shape and rate must be positive");
  const double base = shape * (shape + 1.0) / (rate * rate);
  return {base, base / (shape + 1.5), base / ((shape + 0.5) * (shape + 1.5))};
}

GammaExampleTermEstimates gamma_example_terms_mc(double shape, double rate,
                                                 const McOptions& options) {
  const JointModel joint(std::make_shared<GammaPrior>(shape, rate),
                         std::make_shared<GammaVarianceChannel>());
  auto x2 = [&](Rng& rng) {
    const auto [x, y] = joint.sample(rng);
    return x(0) * x(0);
  };
  auto cross = [&](Rng& rng) {
    const auto [x, y] = joint.sample(rng);
    return x(0) / (y(0) * y(0) + rate);
  };
  auto inv_sq = [&](Rng& rng) {
    const auto [x, y] = joint.sample(rng);
    const double d = y(0) * y(0) + rate;
    return 1.0 / (d * d);
  };
  // Same seed for all three terms: they are functionals of the same joint draws.
  return {mc_mean(x2, options.n, options.seed, options.workers),
          mc_mean(cross, options.n, options.seed, options.workers),
          mc_mean(inv_sq, options.n, options.seed, options.workers)};
}

}  // namespace mmseb
