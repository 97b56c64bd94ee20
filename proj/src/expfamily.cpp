#include "mmseb/expfamily.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mmseb/errors.hpp"

namespace mmseb {

// ---------------------------------------------------------------------------
// ChannelModel defaults

Vector ChannelModel::sample_given_x(const Vector&, Rng&) const {
  throw UnsupportedStrategy(name() + " channel has no sampler");
}

void ChannelModel::require_domain(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != input_dim())
    throw InvalidArgument(name() + ": x has dimension " + std::to_string(x.size()) +
                          ", expected " + std::to_string(input_dim()));
  if (!in_input_domain(x)) throw DomainError(name() + ": x outside the input domain");
}

double ChannelModel::log_cond_pdf(const Vector& x, const Vector& y) const {
  require_domain(x);
  return log_h(y) + x.dot(sufficient_statistic(y)) - log_phi(x);
}

Vector ChannelModel::grad_y_log_cond_pdf(const Vector& x, const Vector& y) const {
  require_domain(x);
  return grad_log_h(y) + jacobian_T(y) * x;
}

Matrix ChannelModel::potential_hessian(const Vector& x, const Vector& y) const {
  return finite_difference_potential_hessian(x, y);
}

Matrix ChannelModel::finite_difference_potential_hessian(const Vector& x, const Vector& y) const {
  const Eigen::Index k = y.size();
  auto u = [&](const Vector& yy) { return -log_cond_pdf(x, yy); };
  Vector step(k);
  for (Eigen::Index i = 0; i < k; ++i) step(i) = 1e-4 * std::max(1.0, std::abs(y(i)));
  Matrix hess(k, k);
  const double u0 = u(y);
  for (Eigen::Index i = 0; i < k; ++i) {
    Vector yp = y, ym = y;
    yp(i) += step(i);
    ym(i) -= step(i);
    hess(i, i) = (u(yp) - 2.0 * u0 + u(ym)) / (step(i) * step(i));
    for (Eigen::Index j = 0; j < i; ++j) {
      Vector ypp = y, ypm = y, ymp = y, ymm = y;
      ypp(i) += step(i), ypp(j) += step(j);
      ypm(i) += step(i), ypm(j) -= step(j);
      ymp(i) -= step(i), ymp(j) += step(j);
      ymm(i) -= step(i), ymm(j) -= step(j);
      hess(i, j) = hess(j, i) = (u(ypp) - u(ypm) - u(ymp) + u(ymm)) / (4.0 * step(i) * step(j));
    }
  }
  return hess;
}

std::vector<Vector> ChannelModel::default_y_grid(std::size_t points) const {
  // Seeded standard-normal cloud scaled to cover [-5, 5]^k roughly.
  Rng rng(split_seed(0x5eedULL, output_dim()));
  std::vector<Vector> grid;
  grid.reserve(points);
  for (std::size_t i = 0; i < points; ++i) {
    Vector y(output_dim());
    for (Eigen::Index j = 0; j < y.size(); ++j) y(j) = 2.0 * rng.normal();
    grid.push_back(std::move(y));
  }
  return grid;
}

// ---------------------------------------------------------------------------
// GaussianChannel

GaussianChannel::GaussianChannel(double noise_variance, std::size_t dim)
    : noise_variance_(noise_variance), dim_(dim) {
  if (!(noise_variance > 0.0) || !std::isfinite(noise_variance))
    throw InvalidArgument("noise variance must be positive and finite");
  if (dim == 0) throw InvalidArgument("dimension must be positive");
}

double GaussianChannel::log_h(const Vector& y) const {
  const double k = static_cast<double>(dim_);
  return -0.5 * k * std::log(2.0 * std::numbers::pi * noise_variance_) -
         y.squaredNorm() / (2.0 * noise_variance_);
}

Vector GaussianChannel::grad_log_h(const Vector& y) const { return -y / noise_variance_; }

Vector GaussianChannel::sufficient_statistic(const Vector& y) const { return y / noise_variance_; }

Matrix GaussianChannel::jacobian_T(const Vector&) const {
  return Matrix::Identity(dim_, dim_) / noise_variance_;
}

double GaussianChannel::log_phi(const Vector& x) const {
  return x.squaredNorm() / (2.0 * noise_variance_);
}

Vector GaussianChannel::sample_given_x(const Vector& x, Rng& rng) const {
  require_domain(x);
  const double sd = std::sqrt(noise_variance_);
  Vector y(dim_);
  for (std::size_t i = 0; i < dim_; ++i) y(i) = x(i) + sd * rng.normal();
  return y;
}

double GaussianChannel::log_cond_pdf(const Vector& x, const Vector& y) const {
  require_domain(x);
  double quad = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) quad += (y(i) - x(i)) * (y(i) - x(i));
  return -0.5 * static_cast<double>(dim_) * std::log(2.0 * std::numbers::pi * noise_variance_) -
         quad / (2.0 * noise_variance_);
}

Matrix GaussianChannel::potential_hessian(const Vector&, const Vector&) const {
  return Matrix::Identity(dim_, dim_) / noise_variance_;
}

std::optional<double> GaussianChannel::exact_bakry_emery(const Vector&) const {
  return 1.0 / noise_variance_;
}

std::optional<double> GaussianChannel::exact_rho() const { return noise_variance_; }

std::vector<Vector> GaussianChannel::default_y_grid(std::size_t points) const {
  if (dim_ != 1) return ChannelModel::default_y_grid(points);
  // Uniform grid on +-10 noise standard deviations (at least +-10).
  const double half = 10.0 * std::max(1.0, std::sqrt(noise_variance_));
  std::vector<Vector> grid;
  grid.reserve(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(points - 1);
    grid.push_back(Vector::Constant(1, -half + 2.0 * half * t));
  }
  return grid;
}

// ---------------------------------------------------------------------------
// GammaVarianceChannel

bool GammaVarianceChannel::in_input_domain(const Vector& x) const {
  return x.size() == 1 && std::isfinite(x(0)) && x(0) > 0.0;
}

double GammaVarianceChannel::log_h(const Vector&) const { return -0.5 * std::log(std::numbers::pi); }

Vector GammaVarianceChannel::grad_log_h(const Vector&) const { return Vector::Zero(1); }

Vector GammaVarianceChannel::sufficient_statistic(const Vector& y) const {
  return Vector::Constant(1, -y(0) * y(0));
}

Matrix GammaVarianceChannel::jacobian_T(const Vector& y) const {
  return Matrix::Constant(1, 1, -2.0 * y(0));
}

double GammaVarianceChannel::log_phi(const Vector& x) const { return -0.5 * std::log(x(0)); }

Vector GammaVarianceChannel::sample_given_x(const Vector& x, Rng& rng) const {
  require_domain(x);
  return Vector::Constant(1, rng.normal() / std::sqrt(2.0 * x(0)));
}

Matrix GammaVarianceChannel::potential_hessian(const Vector& x, const Vector&) const {
  require_domain(x);
  return Matrix::Constant(1, 1, 2.0 * x(0));
}

std::optional<double> GammaVarianceChannel::exact_bakry_emery(const Vector& x) const {
  require_domain(x);
  return 2.0 * x(0);
}

std::optional<double> GammaVarianceChannel::exact_rho() const {
  // sigma_min((-2y)^+) = 1 / (2|y|) has infimum 0 over the real line.
  return 0.0;
}

std::vector<Vector> GammaVarianceChannel::default_y_grid(std::size_t points) const {
  // Symmetric, log-spaced in |y| over [1e-6, 1e7]; y = 0 is excluded (J T = 0 there).
  const std::size_t half = std::max<std::size_t>(1, points / 2);
  std::vector<Vector> grid;
  grid.reserve(2 * half);
  for (std::size_t i = 0; i < half; ++i) {
    const double t = half == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(half - 1);
    const double magnitude = std::pow(10.0, -6.0 + 13.0 * t);
    grid.push_back(Vector::Constant(1, -magnitude));
    grid.push_back(Vector::Constant(1, magnitude));
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Priors

GaussianPrior::GaussianPrior(Matrix covariance)
    : GaussianPrior(covariance, Vector::Zero(covariance.rows())) {}

GaussianPrior::GaussianPrior(Matrix covariance, Vector mean)
    : covariance_(std::move(covariance)), mean_(std::move(mean)) {
  if (covariance_.rows() == 0 || covariance_.rows() != mean_.size())
    throw InvalidArgument("covariance and mean dimensions disagree");
  require_psd(covariance_);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(covariance_);
  const Vector lambda = eig.eigenvalues().cwiseMax(0.0);
  factor_ = eig.eigenvectors() * lambda.cwiseSqrt().asDiagonal();
  positive_definite_ = lambda.minCoeff() > 1e-12 * std::max(1.0, lambda.maxCoeff());
  if (positive_definite_) {
    Eigen::LLT<Matrix> llt(covariance_);
    precision_ = llt.solve(Matrix::Identity(covariance_.rows(), covariance_.cols()));
    log_det_ = 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();
  }
}

Vector GaussianPrior::sample(Rng& rng) const {
  Vector z(mean_.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return mean_ + factor_ * z;
}

std::optional<double> GaussianPrior::log_density(const Vector& x) const {
  if (!positive_definite_) return std::nullopt;
  const Vector d = x - mean_;
  const double k = static_cast<double>(mean_.size());
  return -0.5 * (k * std::log(2.0 * std::numbers::pi) + log_det_ + d.dot(precision_ * d));
}

Vector BpskPrior::sample(Rng& rng) const {
  return Vector::Constant(1, rng.bernoulli(0.5) ? 1.0 : -1.0);
}

SparsePrior::SparsePrior(double alpha) : alpha_(alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("sparsity alpha must lie in [0, 1]");
}

Vector SparsePrior::sample(Rng& rng) const {
  // Bernoulli(alpha) gate, then a standard normal draw for active entries.
  const bool active = rng.bernoulli(alpha_);
  return Vector::Constant(1, active ? rng.normal() : 0.0);
}

GammaPrior::GammaPrior(double shape, double rate) : shape_(shape), rate_(rate) {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate))
    throw InvalidArgument("gamma shape and rate must be positive");
}

Vector GammaPrior::sample(Rng& rng) const { return Vector::Constant(1, rng.gamma(shape_, rate_)); }

Vector GammaPrior::mean() const { return Vector::Constant(1, shape_ / rate_); }

std::optional<double> GammaPrior::log_density(const Vector& x) const {
  if (x(0) <= 0.0) return -std::numeric_limits<double>::infinity();
  return shape_ * std::log(rate_) - std::lgamma(shape_) + (shape_ - 1.0) * std::log(x(0)) -
         rate_ * x(0);
}

Matrix reference_covariance_6d() {
  Matrix published(6, 6);
  published << 5.88, -5.10, 0.72, -3.49, 4.06, 1.08,  //
      -5.10, 9.53, 3.10, 3.94, -3.68, -2.11,          //
      0.72, 3.09, 9.24, -2.28, -0.59, 1.94,           //
      -3.49, 3.94, -2.28, 4.49, -1.38, -1.42,         //
      4.06, -3.68, -0.59, -1.38, 13.23, 1.99,         //
      1.08, -2.11, 1.94, -1.42, 1.99, 2.06;
  return 0.5 * (published + published.transpose());
}

}  // namespace mmseb
