#pragma once

#include <cstddef>

#include "mmseb/infodensity.hpp"
#include "mmseb/linalg.hpp"
#include "mmseb/montecarlo.hpp"

namespace mmseb {

/// How the classical estimator obtains E[X | Y = y].
enum class ConditionalMeanRoute {
  kTweedie,     // closed-form marginal, Tweedie's formula
  kImportance,  // self-normalized importance sampling over the prior
};

struct ClassicalOptions {
  ConditionalMeanRoute route = ConditionalMeanRoute::kTweedie;
  std::size_t n_importance = 2'000;
};

/// Draws at which J_y T(y) was numerically rank deficient are redrawn; more
/// than this fraction of rejections aborts with RankDeficiencyRate.
inline constexpr double kMaxRankRejectionRate = 1e-3;

/// Sample mean of ||X - E[X|Y]||^2 over joint draws (X, Y).
McEstimate mmse_classical_mc(const JointModel& joint, const McOptions& options,
                             const ClassicalOptions& classical = {});

struct Theorem1Estimate {
  McEstimate estimate;
  std::size_t rank_rejections = 0;
};

/// Sample mean of ||(J_y T(Y))^+ grad_y iota(X; Y)||^2 over joint draws.
/// Needs a closed-form marginal.
Theorem1Estimate mmse_theorem1_mc(const JointModel& joint, const McOptions& options);

/// Tr[Sigma (I + Sigma / sigma2)^{-1}] for X ~ N(mu, Sigma) through Gaussian noise.
double mmse_gaussian_closed_form(const Matrix& covariance, double noise_variance);

/// 1 - int phi(y) tanh(1/sigma2 - y/sigma) dy for equiprobable X in {-1, 1}.
double mmse_bpsk(double noise_variance);

/// alpha (alpha + 1) / (beta^2 (alpha + 3/2)) for X ~ Gamma(alpha, beta), Y = Z / sqrt(2X).
double mmse_gamma_example(double shape, double rate);

/// The three expectations whose combination gives the gamma-example MMSE:
/// E[X^2], E[X / (Y^2 + beta)] and E[1 / (Y^2 + beta)^2].
struct GammaExampleTerms {
  double second_moment = 0.0;
  double cross = 0.0;
  double inverse_square = 0.0;
};

struct GammaExampleTermEstimates {
  McEstimate second_moment;
  McEstimate cross;
  McEstimate inverse_square;
};

GammaExampleTerms gamma_example_terms(double shape, double rate);
GammaExampleTermEstimates gamma_example_terms_mc(double shape, double rate,
                                                 const McOptions& options);

}  // namespace mmseb
