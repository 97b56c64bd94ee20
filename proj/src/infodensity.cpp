#include "mmseb/infodensity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "mmseb/errors.hpp"

namespace mmseb {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

double log_normal_1d(double y, double mean, double variance) {
  const double d = y - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * variance) - d * d / (2.0 * variance);
}

// N(mu, Sigma + sigma2 I).
class GaussianGaussianMarginal final : public MarginalEvaluator {
 public:
  GaussianGaussianMarginal(const GaussianPrior& prior, const GaussianChannel& channel)
      : mean_(prior.mean()) {
    const Eigen::Index k = mean_.size();
    const Matrix cov = prior.covariance() + channel.noise_variance() * Matrix::Identity(k, k);
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) throw NotPSD("marginal covariance is not positive definite");
    precision_ = llt.solve(Matrix::Identity(k, k));
    log_norm_ = -0.5 * (static_cast<double>(k) * std::log(2.0 * std::numbers::pi) +
                        2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum());
  }

  bool closed_form() const override { return true; }

  double log_pdf(const Vector& y) const override {
    const Eigen::Index k = mean_.size();
    double quad = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double di = y(i) - mean_(i);
      double row = 0.0;
      for (Eigen::Index j = 0; j < k; ++j) row += precision_(i, j) * (y(j) - mean_(j));
      quad += di * row;
    }
    return log_norm_ - 0.5 * quad;
  }

  Vector grad_log_pdf(const Vector& y) const override { return -(precision_ * (y - mean_)); }

 private:
  Vector mean_;
  Matrix precision_;
  double log_norm_ = 0.0;
};

// 0.5 N(1, s2) + 0.5 N(-1, s2).
class BpskGaussianMarginal final : public MarginalEvaluator {
 public:
  explicit BpskGaussianMarginal(double noise_variance) : s2_(noise_variance) {}

  bool closed_form() const override { return true; }

  double log_pdf(const Vector& y) const override {
    const double t = std::abs(y(0)) / s2_;
    const double d = std::abs(y(0)) - 1.0;
    return -0.5 * std::log(2.0 * std::numbers::pi * s2_) - d * d / (2.0 * s2_) +
           std::log1p(std::exp(-2.0 * t)) - std::numbers::ln2;
  }

  Vector grad_log_pdf(const Vector& y) const override {
    return Vector::Constant(1, (std::tanh(y(0) / s2_) - y(0)) / s2_);
  }

 private:
  double s2_;
};

// (1 - alpha) N(0, s2) + alpha N(0, 1 + s2).
class SparseGaussianMarginal final : public MarginalEvaluator {
 public:
  SparseGaussianMarginal(double alpha, double noise_variance)
      : alpha_(alpha), s2_(noise_variance) {}

  bool closed_form() const override { return true; }

  double log_pdf(const Vector& y) const override {
    const auto [l0, l1] = component_logs(y(0));
    return log_add_exp(l0, l1);
  }

  Vector grad_log_pdf(const Vector& y) const override {
    const auto [l0, l1] = component_logs(y(0));
    const double total = log_add_exp(l0, l1);
    const double w0 = l0 == kNegInf ? 0.0 : std::exp(l0 - total);
    const double w1 = l1 == kNegInf ? 0.0 : std::exp(l1 - total);
    return Vector::Constant(1, -y(0) * (w0 / s2_ + w1 / (1.0 + s2_)));
  }

 private:
  std::pair<double, double> component_logs(double y) const {
    const double l0 = alpha_ < 1.0 ? std::log1p(-alpha_) + log_normal_1d(y, 0.0, s2_) : kNegInf;
    const double l1 = alpha_ > 0.0 ? std::log(alpha_) + log_normal_1d(y, 0.0, 1.0 + s2_) : kNegInf;
    return {l0, l1};
  }

  double alpha_;
  double s2_;
};

// f_Y(y) = pi^{-1/2} beta^alpha Gamma(alpha + 1/2) / Gamma(alpha) (y^2 + beta)^{-(alpha + 1/2)}.
class GammaMarginal final : public MarginalEvaluator {
 public:
  GammaMarginal(double shape, double rate)
      : shape_(shape),
        rate_(rate),
        log_norm_(-0.5 * std::log(std::numbers::pi) + shape * std::log(rate) +
                  std::lgamma(shape + 0.5) - std::lgamma(shape)) {}

  bool closed_form() const override { return true; }

  double log_pdf(const Vector& y) const override {
    return log_norm_ - (shape_ + 0.5) * std::log(y(0) * y(0) + rate_);
  }

  Vector grad_log_pdf(const Vector& y) const override {
    return Vector::Constant(1, -y(0) * (2.0 * shape_ + 1.0) / (y(0) * y(0) + rate_));
  }

 private:
  double shape_;
  double rate_;
  double log_norm_;
};

// Deterministic input: f_Y = f(. | c).
class PointMassMarginal final : public MarginalEvaluator {
 public:
  PointMassMarginal(Vector location, std::shared_ptr<const ChannelModel> channel)
      : location_(std::move(location)), channel_(std::move(channel)) {}

  bool closed_form() const override { return true; }
  double log_pdf(const Vector& y) const override { return channel_->log_cond_pdf(location_, y); }
  Vector grad_log_pdf(const Vector& y) const override {
    return channel_->grad_y_log_cond_pdf(location_, y);
  }

 private:
  Vector location_;
  std::shared_ptr<const ChannelModel> channel_;
};

class MonteCarloMarginalEvaluator final : public MarginalEvaluator {
 public:
  MonteCarloMarginalEvaluator(const PriorModel& prior, std::shared_ptr<const ChannelModel> channel,
                              const MonteCarloMarginal& config)
      : channel_(std::move(channel)) {
    if (config.n_marginal == 0) throw InvalidArgument("n_marginal must be positive");
    Rng rng(config.seed);
    draws_.reserve(config.n_marginal);
    for (std::size_t i = 0; i < config.n_marginal; ++i) draws_.push_back(prior.sample(rng));
    log_n_ = std::log(static_cast<double>(config.n_marginal));
  }

  bool closed_form() const override { return false; }

  double log_pdf(const Vector& y) const override {
    double max_log = kNegInf;
    std::vector<double> logs(draws_.size());
    for (std::size_t i = 0; i < draws_.size(); ++i) {
      logs[i] = channel_->log_cond_pdf(draws_[i], y);
      max_log = std::max(max_log, logs[i]);
    }
    if (!(max_log > kNegInf) || !std::isfinite(max_log))
      throw NumericalUnderflow("all sampled conditional densities vanish at y");
    double sum = 0.0;
    for (double l : logs) sum += std::exp(l - max_log);
    return max_log + std::log(sum) - log_n_;
  }

  Vector grad_log_pdf(const Vector&) const override {
    throw UnsupportedStrategy("gradients of Monte Carlo marginals are not provided");
  }

 private:
  std::shared_ptr<const ChannelModel> channel_;
  std::vector<Vector> draws_;
  double log_n_ = 0.0;
};

std::shared_ptr<const MarginalEvaluator> make_closed_form(
    const std::shared_ptr<const PriorModel>& prior,
    const std::shared_ptr<const ChannelModel>& channel) {
  if (const auto* point = dynamic_cast<const PointMassPrior*>(prior.get()))
    return std::make_shared<PointMassMarginal>(point->location(), channel);
  if (const auto* gauss = dynamic_cast<const GaussianChannel*>(channel.get())) {
    if (const auto* p = dynamic_cast<const GaussianPrior*>(prior.get()))
      return std::make_shared<GaussianGaussianMarginal>(*p, *gauss);
    if (dynamic_cast<const BpskPrior*>(prior.get()))
      return std::make_shared<BpskGaussianMarginal>(gauss->noise_variance());
    if (const auto* p = dynamic_cast<const SparsePrior*>(prior.get()))
      return std::make_shared<SparseGaussianMarginal>(p->alpha(), gauss->noise_variance());
  }
  if (dynamic_cast<const GammaVarianceChannel*>(channel.get())) {
    if (const auto* p = dynamic_cast<const GammaPrior*>(prior.get()))
      return std::make_shared<GammaMarginal>(p->shape(), p->rate());
  }
  return nullptr;
}

}  // namespace

bool closed_form_available(const PriorModel& prior, const ChannelModel& channel) {
  if (dynamic_cast<const PointMassPrior*>(&prior)) return true;
  if (dynamic_cast<const GaussianChannel*>(&channel))
    return dynamic_cast<const GaussianPrior*>(&prior) || dynamic_cast<const BpskPrior*>(&prior) ||
           dynamic_cast<const SparsePrior*>(&prior);
  if (dynamic_cast<const GammaVarianceChannel*>(&channel))
    return dynamic_cast<const GammaPrior*>(&prior) != nullptr;
  return false;
}

JointModel::JointModel(std::shared_ptr<const PriorModel> prior,
                       std::shared_ptr<const ChannelModel> channel, MarginalStrategy strategy)
    : prior_(std::move(prior)), channel_(std::move(channel)), strategy_(strategy) {
  if (!prior_ || !channel_) throw InvalidArgument("joint model needs a prior and a channel");
  if (prior_->dim() != channel_->input_dim())
    throw InvalidArgument("prior dimension " + std::to_string(prior_->dim()) +
                          " does not match channel input dimension " +
                          std::to_string(channel_->input_dim()));
  if (std::holds_alternative<ClosedFormMarginal>(strategy_)) {
    marginal_ = make_closed_form(prior_, channel_);
    if (!marginal_)
      throw UnsupportedStrategy("no closed-form marginal for prior '" + prior_->name() +
                                "' with channel '" + channel_->name() + "'");
  } else {
    marginal_ = std::make_shared<MonteCarloMarginalEvaluator>(
        *prior_, channel_, std::get<MonteCarloMarginal>(strategy_));
  }
}

std::pair<Vector, Vector> JointModel::sample(Rng& rng) const {
  Vector x = prior_->sample(rng);
  Vector y = channel_->sample_given_x(x, rng);
  return {std::move(x), std::move(y)};
}

double marginal_log_pdf(const JointModel& joint, const Vector& y) {
  if (static_cast<std::size_t>(y.size()) != joint.channel().output_dim())
    throw InvalidArgument("y has the wrong dimension");
  if (!y.allFinite()) throw DomainError("y must be finite");
  return joint.marginal().log_pdf(y);
}

double info_density(const JointModel& joint, const Vector& x, const Vector& y) {
  const double log_marginal = marginal_log_pdf(joint, y);
  if (log_marginal == kNegInf)
    throw DomainError("f_Y(y) = 0: P_{Y|X=x} is not absolutely continuous w.r.t. P_Y");
  return joint.channel().log_cond_pdf(x, y) - log_marginal;
}

Vector grad_y_info_density(const JointModel& joint, const Vector& x, const Vector& y) {
  if (!joint.has_closed_form())
    throw UnsupportedStrategy("information-density gradient needs a closed-form marginal");
  const ChannelModel& ch = joint.channel();
  return ch.jacobian_T(y) * x + ch.grad_log_h(y) - joint.marginal().grad_log_pdf(y);
}

Vector grad_y_info_density_via_posterior_mean(const JointModel& joint, const Vector& x,
                                              const Vector& y) {
  return joint.channel().jacobian_T(y) * (x - cond_mean_tweedie(joint, y));
}

Vector tweedie_score(const JointModel& joint, const Vector& y) {
  if (!joint.has_closed_form())
    throw UnsupportedStrategy("Tweedie's formula needs a closed-form marginal");
  return joint.marginal().grad_log_pdf(y) - joint.channel().grad_log_h(y);
}

Vector cond_mean_tweedie(const JointModel& joint, const Vector& y) {
  const Vector score = tweedie_score(joint, y);
  return left_pseudo_inverse(joint.channel().jacobian_T(y)) * score;
}

ImportanceEstimate cond_mean_importance(const JointModel& joint, const Vector& y, std::size_t n,
                                        Rng& rng) {
  if (n < 1000) throw InvalidArgument("importance sampling needs n >= 1000");
  const std::size_t d = joint.prior().dim();
  std::vector<Vector> xs;
  std::vector<double> logw(n);
  xs.reserve(n);
  double max_log = kNegInf;
  for (std::size_t i = 0; i < n; ++i) {
    xs.push_back(joint.prior().sample(rng));
    logw[i] = joint.channel().log_cond_pdf(xs.back(), y);
    max_log = std::max(max_log, logw[i]);
  }
  if (!std::isfinite(max_log)) throw DegenerateWeights("all importance weights vanish");
  double sum_w = 0.0, sum_w2 = 0.0;
  Vector mean = Vector::Zero(d);
  for (std::size_t i = 0; i < n; ++i) {
    logw[i] = std::exp(logw[i] - max_log);
    sum_w += logw[i];
    sum_w2 += logw[i] * logw[i];
    mean += logw[i] * xs[i];
  }
  mean /= sum_w;
  const double ess = sum_w * sum_w / sum_w2;
  if (ess < 10.0) throw DegenerateWeights("effective sample size " + std::to_string(ess));
  Vector var = Vector::Zero(d);
  for (std::size_t i = 0; i < n; ++i)
    var += (logw[i] * logw[i]) * (xs[i] - mean).cwiseAbs2();
  return {mean, var.cwiseSqrt() / sum_w, ess};
}

}  // namespace mmseb
