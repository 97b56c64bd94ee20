#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmseb/infodensity.hpp"
#include "mmseb/montecarlo.hpp"

namespace mmseb {

/// kappa_BE(x) = max{0, min_y lambda_min(Hess_y[-log f(y|x)])}. Channels with
/// a closed form (Gaussian: 1/sigma2, gamma-variance: 2x) bypass the grid.
/// Throws EmptyGrid for an empty grid.
double bakry_emery_constant(const ChannelModel& channel, const Vector& x,
                            std::span<const Vector> y_grid);
double bakry_emery_constant(const ChannelModel& channel, const Vector& x);

enum class HessianSource {
  kChannel,           // ChannelModel::potential_hessian (analytic where available)
  kFiniteDifference,  // central differences of log_cond_pdf
};

/// Grid minimum of lambda_min of the potential Hessian, clamped at 0.
double bakry_emery_constant_on_grid(const ChannelModel& channel, const Vector& x,
                                    std::span<const Vector> y_grid,
                                    HessianSource source = HessianSource::kChannel);

/// rho = inf_y sigma_min((J_y T(y))^+). Closed forms come from the channel
/// (Gaussian: sigma2; gamma-variance: 0, the infimum of 1/(2|y|)).
double rho(const ChannelModel& channel, std::span<const Vector> y_grid);
double rho(const ChannelModel& channel);

/// Grid infimum; rank-deficient grid points are skipped. Throws
/// RankDeficientEverywhere when no grid point has full column rank.
double rho_on_grid(const ChannelModel& channel, std::span<const Vector> y_grid);

/// Var(iota(x; Y) | X = x) from n_inner draws of Y ~ P_{Y|X=x}.
McEstimate cond_info_variance(const JointModel& joint, const Vector& x, std::size_t n_inner,
                              std::uint64_t seed);

struct BoundOptions {
  std::size_t n_outer = 2'000;
  std::size_t n_inner = 2'000;
  std::uint64_t seed = 42;
  unsigned workers = 1;
  /// Use ||X - E X||^2 (exact mean Tr Cov X) as a control variate for the
  /// outer average over prior draws.
  bool control_variate = false;
};

struct PoincareBound {
  McEstimate estimate;
  double rho = 0.0;
  /// rho == 0: the bound is formally valid but equal to 0.
  bool trivial = false;
  std::string diagnostic;
};

/// rho^2 E[kappa(X) Var(iota(X; Y) | X)] by nested Monte Carlo.
PoincareBound poincare_lower_bound(const JointModel& joint, std::span<const Vector> y_grid,
                                   const BoundOptions& options);
PoincareBound poincare_lower_bound(const JointModel& joint, const BoundOptions& options);

/// sigma2 E[Var(iota(X; Y) | X)] for a Gaussian channel. Throws WrongChannel.
McEstimate poincare_lb_gaussian(const JointModel& joint, const BoundOptions& options);

/// k^2 sigma2 / (k + sigma2 J_X).
double cramer_rao_gaussian(double fisher_info, std::size_t dim, double noise_variance);

/// Fisher information Tr[Sigma^{-1}] of N(mu, Sigma).
double gaussian_prior_fisher(const Matrix& covariance);

/// Cramer-Rao bound of a joint. Throws PriorHasNoDensity for priors without a
/// differentiable density and WrongChannel for non-Gaussian channels.
double cramer_rao_bound(const JointModel& joint);

struct HighNoiseRow {
  double noise_variance = 0.0;
  McEstimate lower_bound;
  double variance_target = 0.0;
  double ratio = 0.0;
};

/// sigma2 E[Var(iota | X)] against Tr Cov X on a noise grid. The ratio is
/// defined as 1 when the prior is deterministic.
std::vector<HighNoiseRow> high_noise_diagnostic(std::shared_ptr<const PriorModel> prior,
                                                std::span<const double> noise_grid,
                                                const BoundOptions& options);

struct BoundReport {
  PoincareBound poincare;
  double rho = 0.0;
  std::string kappa_summary;
  std::optional<double> cramer_rao;
  McEstimate mmse_reference;
  double variance_target = 0.0;

  /// poincare <= mmse + 3 combined SE and poincare >= 0.
  bool consistent() const;
};

BoundReport bound_report(const JointModel& joint, const McEstimate& mmse_reference,
                         const BoundOptions& options);

}  // namespace mmseb
