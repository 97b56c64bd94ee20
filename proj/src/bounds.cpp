#include "mmseb/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmseb/errors.hpp"

namespace mmseb {
namespace {

std::vector<Vector> grid_or_default(const ChannelModel& channel, std::span<const Vector> grid,
                                    std::vector<Vector>& storage) {
  if (!grid.empty()) return {grid.begin(), grid.end()};
  storage = channel.default_y_grid();
  return storage;
}

// Unbiased sample variance of iota(x; Y_i), Y_i ~ P_{Y|X=x} drawn from rng.
double inner_info_variance(const JointModel& joint, const Vector& x, std::size_t n_inner,
                           Rng& rng) {
  const ChannelModel& channel = joint.channel();
  // Welford; the inner draws are consumed once.
  double mean = 0.0, m2 = 0.0;
  for (std::size_t j = 0; j < n_inner; ++j) {
    const Vector y = channel.sample_given_x(x, rng);
    const double v = info_density(joint, x, y);
    if (!std::isfinite(v)) throw NonFiniteSample("information density is not finite");
    const double delta = v - mean;
    mean += delta / static_cast<double>(j + 1);
    m2 += delta * (v - mean);
  }
  return m2 / static_cast<double>(n_inner - 1);
}

// Outer average over prior draws of weight(x) * Var(iota | X = x).
// Outer draw i owns Rng(split_seed(seed, i)) for x and its inner draws.
template <class Weight>
McEstimate nested_estimate(const JointModel& joint, const BoundOptions& options,
                           const Weight& weight) {
  if (options.n_outer < 3 || options.n_inner < 2)
    throw InvalidArgument("nested estimator needs n_outer >= 3 and n_inner >= 2");
  const PriorModel& prior = joint.prior();
  const Vector prior_mean = prior.mean();
  std::vector<double> f(options.n_outer), g(options.n_outer);
  parallel_for(options.n_outer, options.workers, [&](std::size_t i) {
    Rng rng(split_seed(options.seed, i));
    const Vector x = prior.sample(rng);
    g[i] = (x - prior_mean).squaredNorm();
    const double w = weight(x);
    // kappa(x) = 0 carries no information; skip the inner loop.
    f[i] = w > 0.0 ? w * inner_info_variance(joint, x, options.n_inner, rng) : 0.0;
  });
  for (double v : f)
    if (!std::isfinite(v)) throw NonFiniteSample("nested sample is not finite");
  if (options.control_variate)
    return control_variate_mean(f, g, prior.trace_covariance(), options.seed);
  const auto stats = sample_stats(f);
  return {stats.mean, stats.std_error, options.n_outer, options.seed};
}

const GaussianChannel& require_gaussian(const ChannelModel& channel) {
  const auto* gauss = dynamic_cast<const GaussianChannel*>(&channel);
  if (!gauss) throw WrongChannel("expected a Gaussian channel, got '" + channel.name() + "'");
  return *gauss;
}

}  // namespace

double bakry_emery_constant_on_grid(const ChannelModel& channel, const Vector& x,
                                    std::span<const Vector> y_grid, HessianSource source) {
  if (y_grid.empty()) throw EmptyGrid("Bakry-Emery grid is empty");
  double lowest = std::numeric_limits<double>::infinity();
  for (const Vector& y : y_grid) {
    Matrix hess = source == HessianSource::kChannel
                      ? channel.potential_hessian(x, y)
                      : channel.finite_difference_potential_hessian(x, y);
    hess = 0.5 * (hess + hess.transpose());
    lowest = std::min(lowest, smallest_eigenvalue(hess));
  }
  return std::max(0.0, lowest);
}

double bakry_emery_constant(const ChannelModel& channel, const Vector& x,
                            std::span<const Vector> y_grid) {
  if (y_grid.empty()) throw EmptyGrid("Bakry-Emery grid is empty");
  if (auto exact = channel.exact_bakry_emery(x)) return std::max(0.0, *exact);
  return bakry_emery_constant_on_grid(channel, x, y_grid);
}

double bakry_emery_constant(const ChannelModel& channel, const Vector& x) {
  if (auto exact = channel.exact_bakry_emery(x)) return std::max(0.0, *exact);
  const auto grid = channel.default_y_grid();
  return bakry_emery_constant_on_grid(channel, x, grid);
}

double rho_on_grid(const ChannelModel& channel, std::span<const Vector> y_grid) {
  if (y_grid.empty()) throw EmptyGrid("rho grid is empty");
  double lowest = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const Vector& y : y_grid) {
    const Matrix jac = channel.jacobian_T(y);
    if (!has_full_column_rank(jac)) continue;
    any = true;
    lowest = std::min(lowest, smallest_singular_value(left_pseudo_inverse(jac)));
  }
  if (!any) throw RankDeficientEverywhere("J_y T(y) is rank deficient on the whole grid");
  return lowest;
}

double rho(const ChannelModel& channel, std::span<const Vector> y_grid) {
  if (y_grid.empty()) throw EmptyGrid("rho grid is empty");
  if (auto exact = channel.exact_rho()) return *exact;
  return rho_on_grid(channel, y_grid);
}

double rho(const ChannelModel& channel) {
  if (auto exact = channel.exact_rho()) return *exact;
  const auto grid = channel.default_y_grid();
  return rho_on_grid(channel, grid);
}

McEstimate cond_info_variance(const JointModel& joint, const Vector& x, std::size_t n_inner,
                              std::uint64_t seed) {
  const ChannelModel& channel = joint.channel();
  auto draw = [&](Rng& rng) { return info_density(joint, x, channel.sample_given_x(x, rng)); };
  return mc_variance(draw, n_inner, seed);
}

PoincareBound poincare_lower_bound(const JointModel& joint, std::span<const Vector> y_grid,
                                   const BoundOptions& options) {
  const ChannelModel& channel = joint.channel();
  std::vector<Vector> storage;
  const auto grid = grid_or_default(channel, y_grid, storage);
  PoincareBound out;
  out.rho = rho(channel, grid);
  if (out.rho == 0.0) {
    out.trivial = true;
    out.estimate = {0.0, 0.0, options.n_outer, options.seed};
    out.diagnostic = "TrivialBound: rho = 0 for channel '" + channel.name() + "'";
    return out;
  }
  const double rho2 = out.rho * out.rho;
  out.estimate = nested_estimate(joint, options, [&](const Vector& x) {
    return rho2 * bakry_emery_constant(channel, x, grid);
  });
  return out;
}

PoincareBound poincare_lower_bound(const JointModel& joint, const BoundOptions& options) {
  return poincare_lower_bound(joint, std::span<const Vector>{}, options);
}

McEstimate poincare_lb_gaussian(const JointModel& joint, const BoundOptions& options) {
  const double s2 = require_gaussian(joint.channel()).noise_variance();
  return nested_estimate(joint, options, [s2](const Vector&) { return s2; });
}

double cramer_rao_gaussian(double fisher_info, std::size_t dim, double noise_variance) {
  if (!(fisher_info > 0.0)) throw InvalidArgument("Fisher information must be positive");
  if (!(noise_variance > 0.0)) throw InvalidArgument("noise variance must be positive");
  const double k = static_cast<double>(dim);
  return k * k * noise_variance / (k + noise_variance * fisher_info);
}

double gaussian_prior_fisher(const Matrix& covariance) {
  require_psd(covariance);
  Eigen::LLT<Matrix> llt(covariance);
  if (llt.info() != Eigen::Success)
    throw PriorHasNoDensity("singular covariance: the prior has no Lebesgue density");
  return llt.solve(Matrix::Identity(covariance.rows(), covariance.cols())).trace();
}

double cramer_rao_bound(const JointModel& joint) {
  const double s2 = require_gaussian(joint.channel()).noise_variance();
  const auto* gauss = dynamic_cast<const GaussianPrior*>(&joint.prior());
  if (!gauss || !gauss->log_density(gauss->mean()))
    throw PriorHasNoDensity("prior '" + joint.prior().name() +
                            "' has no differentiable density; the Cramer-Rao bound does not apply");
  return cramer_rao_gaussian(gaussian_prior_fisher(gauss->covariance()), joint.prior().dim(), s2);
}

std::vector<HighNoiseRow> high_noise_diagnostic(std::shared_ptr<const PriorModel> prior,
                                                std::span<const double> noise_grid,
                                                const BoundOptions& options) {
  std::vector<HighNoiseRow> rows;
  rows.reserve(noise_grid.size());
  const double target = prior->trace_covariance();
  for (std::size_t r = 0; r < noise_grid.size(); ++r) {
    const JointModel joint(prior, std::make_shared<GaussianChannel>(noise_grid[r], prior->dim()));
    BoundOptions row_options = options;
    row_options.seed = split_seed(options.seed, 1'000'000 + r);
    HighNoiseRow row;
    row.noise_variance = noise_grid[r];
    row.lower_bound = poincare_lb_gaussian(joint, row_options);
    row.variance_target = target;
    row.ratio = target == 0.0 ? 1.0 : row.lower_bound.value / target;
    rows.push_back(row);
  }
  return rows;
}

bool BoundReport::consistent() const {
  const double se = std::hypot(poincare.estimate.std_error, mmse_reference.std_error);
  return poincare.estimate.value >= 0.0 &&
         poincare.estimate.value <= mmse_reference.value + 3.0 * se;
}

BoundReport bound_report(const JointModel& joint, const McEstimate& mmse_reference,
                         const BoundOptions& options) {
  BoundReport report;
  report.poincare = poincare_lower_bound(joint, options);
  report.rho = report.poincare.rho;
  const ChannelModel& channel = joint.channel();
  report.kappa_summary =
      channel.exact_bakry_emery(joint.prior().mean()) ? "closed-form" : "grid-min";
  try {
    report.cramer_rao = cramer_rao_bound(joint);
  } catch (const PriorHasNoDensity&) {
  } catch (const WrongChannel&) {
  }
  report.mmse_reference = mmse_reference;
  report.variance_target = joint.prior().trace_covariance();
  return report;
}

}  // namespace mmseb
