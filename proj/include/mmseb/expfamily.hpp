#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mmseb/linalg.hpp"
#include "mmseb/rng.hpp"

namespace mmseb {

/// Conditional law Y | X = x with density h(y) exp(<x, T(y)> - phi(x)).
///
/// Shapes: x in R^d (input_dim), y in R^k (output_dim), T(y) in R^d and the
/// Jacobian J_y T(y) is k x d, i.e. column j is the y-gradient of T_j. With
/// this layout grad_y <x, T(y)> = J_y T(y) x.
class ChannelModel {
 public:
  virtual ~ChannelModel() = default;

  virtual std::string name() const = 0;
  virtual std::size_t input_dim() const = 0;
  virtual std::size_t output_dim() const = 0;

  virtual bool in_input_domain(const Vector& x) const { return x.allFinite(); }

  virtual double log_h(const Vector& y) const = 0;
  virtual Vector grad_log_h(const Vector& y) const = 0;
  virtual Vector sufficient_statistic(const Vector& y) const = 0;
  virtual Matrix jacobian_T(const Vector& y) const = 0;
  virtual double log_phi(const Vector& x) const = 0;

  /// Draws y ~ P_{Y|X=x}. The default throws; every built-in overrides it.
  virtual Vector sample_given_x(const Vector& x, Rng& rng) const;

  /// log h(y) + <x, T(y)> - phi(x). Throws DomainError outside the input domain.
  virtual double log_cond_pdf(const Vector& x, const Vector& y) const;

  /// grad_y log f(y|x) = grad log h(y) + J_y T(y) x.
  virtual Vector grad_y_log_cond_pdf(const Vector& x, const Vector& y) const;

  /// Hessian in y of -log f(y|x), i.e. the Bakry-Emery potential. The default
  /// is a central finite difference of log_cond_pdf; channels with a closed
  /// form override it.
  virtual Matrix potential_hessian(const Vector& x, const Vector& y) const;

  /// Central-difference Hessian of -log f(y|x) in y.
  Matrix finite_difference_potential_hessian(const Vector& x, const Vector& y) const;

  /// Closed-form Bakry-Emery constant kappa_BE(x), when known.
  virtual std::optional<double> exact_bakry_emery(const Vector& /*x*/) const { return std::nullopt; }

  /// Closed-form inf_y sigma_min((J_y T(y))^+), when known.
  virtual std::optional<double> exact_rho() const { return std::nullopt; }

  /// Heuristic y-grid for the grid paths of kappa and rho.
  virtual std::vector<Vector> default_y_grid(std::size_t points = 10'000) const;

 protected:
  void require_domain(const Vector& x) const;
};

/// Y = X + N, N ~ N(0, sigma2 I_k).
class GaussianChannel : public ChannelModel {
 public:
  GaussianChannel(double noise_variance, std::size_t dim);

  double noise_variance() const { return noise_variance_; }

  std::string name() const override { return "gaussian"; }
  std::size_t input_dim() const override { return dim_; }
  std::size_t output_dim() const override { return dim_; }

  double log_h(const Vector& y) const override;
  Vector grad_log_h(const Vector& y) const override;
  Vector sufficient_statistic(const Vector& y) const override;
  Matrix jacobian_T(const Vector& y) const override;
  double log_phi(const Vector& x) const override;
  Vector sample_given_x(const Vector& x, Rng& rng) const override;
  double log_cond_pdf(const Vector& x, const Vector& y) const override;
  Matrix potential_hessian(const Vector& x, const Vector& y) const override;
  std::optional<double> exact_bakry_emery(const Vector& x) const override;
  std::optional<double> exact_rho() const override;
  std::vector<Vector> default_y_grid(std::size_t points) const override;

 private:
  double noise_variance_;
  std::size_t dim_;
};

/// Scalar Y = Z / sqrt(2 X) with Z ~ N(0, 1) and X > 0, so that
/// f(y|x) = sqrt(x / pi) exp(-x y^2): h = 1/sqrt(pi), T(y) = -y^2, phi(x) = -log sqrt(x).
class GammaVarianceChannel : public ChannelModel {
 public:
  std::string name() const override { return "gamma_variance"; }
  std::size_t input_dim() const override { return 1; }
  std::size_t output_dim() const override { return 1; }
  bool in_input_domain(const Vector& x) const override;

  double log_h(const Vector& y) const override;
  Vector grad_log_h(const Vector& y) const override;
  Vector sufficient_statistic(const Vector& y) const override;
  Matrix jacobian_T(const Vector& y) const override;
  double log_phi(const Vector& x) const override;
  Vector sample_given_x(const Vector& x, Rng& rng) const override;
  Matrix potential_hessian(const Vector& x, const Vector& y) const override;
  std::optional<double> exact_bakry_emery(const Vector& x) const override;
  std::optional<double> exact_rho() const override;
  std::vector<Vector> default_y_grid(std::size_t points) const override;
};

/// Input distribution P_X.
class PriorModel {
 public:
  virtual ~PriorModel() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;
  virtual Vector sample(Rng& rng) const = 0;
  virtual Vector mean() const = 0;
  /// Tr Cov(X); equals Var(X) for scalar priors.
  virtual double trace_covariance() const = 0;
  /// Lebesgue log-density, absent for discrete or mixed priors.
  virtual std::optional<double> log_density(const Vector& /*x*/) const { return std::nullopt; }
};

/// N(mean, covariance); the covariance may be singular (PSD).
class GaussianPrior : public PriorModel {
 public:
  explicit GaussianPrior(Matrix covariance);
  GaussianPrior(Matrix covariance, Vector mean);

  const Matrix& covariance() const { return covariance_; }

  std::string name() const override { return "gaussian"; }
  std::size_t dim() const override { return static_cast<std::size_t>(mean_.size()); }
  Vector sample(Rng& rng) const override;
  Vector mean() const override { return mean_; }
  double trace_covariance() const override { return covariance_.trace(); }
  std::optional<double> log_density(const Vector& x) const override;

 private:
  Matrix covariance_;
  Vector mean_;
  Matrix factor_;  // factor_ * factor_^T == covariance_
  bool positive_definite_ = false;
  Matrix precision_;
  double log_det_ = 0.0;
};

/// X in {-1, +1} with equal probability.
class BpskPrior : public PriorModel {
 public:
  std::string name() const override { return "bpsk"; }
  std::size_t dim() const override { return 1; }
  Vector sample(Rng& rng) const override;
  Vector mean() const override { return Vector::Zero(1); }
  double trace_covariance() const override { return 1.0; }
};

/// (1 - alpha) delta_0 + alpha N(0, 1).
class SparsePrior : public PriorModel {
 public:
  explicit SparsePrior(double alpha);

  double alpha() const { return alpha_; }

  std::string name() const override { return "sparse"; }
  std::size_t dim() const override { return 1; }
  Vector sample(Rng& rng) const override;
  Vector mean() const override { return Vector::Zero(1); }
  double trace_covariance() const override { return alpha_; }

 private:
  double alpha_;
};

/// Gamma(shape, rate): density rate^shape / Gamma(shape) x^{shape-1} e^{-rate x}.
class GammaPrior : public PriorModel {
 public:
  GammaPrior(double shape, double rate);

  double shape() const { return shape_; }
  double rate() const { return rate_; }

  std::string name() const override { return "gamma"; }
  std::size_t dim() const override { return 1; }
  Vector sample(Rng& rng) const override;
  Vector mean() const override;
  double trace_covariance() const override { return shape_ / (rate_ * rate_); }
  std::optional<double> log_density(const Vector& x) const override;

 private:
  double shape_;
  double rate_;
};

/// Deterministic X = c.
class PointMassPrior : public PriorModel {
 public:
  explicit PointMassPrior(Vector location) : location_(std::move(location)) {}

  const Vector& location() const { return location_; }

  std::string name() const override { return "point_mass"; }
  std::size_t dim() const override { return static_cast<std::size_t>(location_.size()); }
  Vector sample(Rng&) const override { return location_; }
  Vector mean() const override { return location_; }
  double trace_covariance() const override { return 0.0; }

 private:
  Vector location_;
};

/// The 6x6 input covariance used for the Gaussian-input experiment. The
/// published table differs from its transpose in one pair of entries
/// (3.10 vs 3.09); the constant is the symmetric part.
Matrix reference_covariance_6d();

}  // namespace mmseb
