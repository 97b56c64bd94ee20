#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <variant>

#include "mmseb/expfamily.hpp"
#include "mmseb/linalg.hpp"
#include "mmseb/rng.hpp"

namespace mmseb {

struct ClosedFormMarginal {};

/// f_Y(y) approximated by (1/n) sum_i f(y | x_i) over n prior draws made once
/// from `seed`, so every evaluation uses the same draws.
struct MonteCarloMarginal {
  std::size_t n_marginal = 10'000;
  std::uint64_t seed = 7;
};

using MarginalStrategy = std::variant<ClosedFormMarginal, MonteCarloMarginal>;

/// Evaluator of the output marginal f_Y.
class MarginalEvaluator {
 public:
  virtual ~MarginalEvaluator() = default;
  virtual bool closed_form() const = 0;
  virtual double log_pdf(const Vector& y) const = 0;
  /// Analytic grad_y log f_Y(y). Throws UnsupportedStrategy for Monte Carlo marginals.
  virtual Vector grad_log_pdf(const Vector& y) const = 0;
};

/// True for the (prior, channel) pairs with an analytic marginal:
/// Gaussian/BPSK/sparse priors through a Gaussian channel, a gamma prior
/// through the gamma-variance channel, and a point mass through any channel.
bool closed_form_available(const PriorModel& prior, const ChannelModel& channel);

/// P_X x P_{Y|X} together with the strategy used for f_Y.
class JointModel {
 public:
  JointModel(std::shared_ptr<const PriorModel> prior, std::shared_ptr<const ChannelModel> channel,
             MarginalStrategy strategy = ClosedFormMarginal{});

  const PriorModel& prior() const { return *prior_; }
  const ChannelModel& channel() const { return *channel_; }
  std::shared_ptr<const PriorModel> prior_ptr() const { return prior_; }
  std::shared_ptr<const ChannelModel> channel_ptr() const { return channel_; }
  const MarginalStrategy& strategy() const { return strategy_; }
  const MarginalEvaluator& marginal() const { return *marginal_; }
  bool has_closed_form() const { return marginal_->closed_form(); }

  /// One joint draw: x ~ P_X then y ~ P_{Y|X=x}.
  std::pair<Vector, Vector> sample(Rng& rng) const;

 private:
  std::shared_ptr<const PriorModel> prior_;
  std::shared_ptr<const ChannelModel> channel_;
  MarginalStrategy strategy_;
  std::shared_ptr<const MarginalEvaluator> marginal_;
};

double marginal_log_pdf(const JointModel& joint, const Vector& y);

/// iota(x; y) = log f(y|x) - log f_Y(y).
double info_density(const JointModel& joint, const Vector& x, const Vector& y);

/// grad_y iota(x; y) = J_y T(y) x + grad log h(y) - grad log f_Y(y). Needs a
/// closed-form marginal.
Vector grad_y_info_density(const JointModel& joint, const Vector& x, const Vector& y);

/// Verification route for the gradient: J_y T(y) (x - E[X | Y = y]).
Vector grad_y_info_density_via_posterior_mean(const JointModel& joint, const Vector& x,
                                              const Vector& y);

/// grad_y log(f_Y(y) / h(y)), the right-hand side of Tweedie's identity.
Vector tweedie_score(const JointModel& joint, const Vector& y);

/// E[X | Y = y] = (J_y T(y))^+ grad_y log(f_Y(y) / h(y)). Throws RankDeficient
/// when J_y T(y) lacks full column rank.
Vector cond_mean_tweedie(const JointModel& joint, const Vector& y);

struct ImportanceEstimate {
  Vector mean;
  Vector std_error;
  double effective_sample_size = 0.0;
};

/// Self-normalized importance sampling of E[X | Y = y] with the prior as
/// proposal. Needs n >= 1000; throws DegenerateWeights when ESS < 10.
ImportanceEstimate cond_mean_importance(const JointModel& joint, const Vector& y, std::size_t n,
                                        Rng& rng);

}  // namespace mmseb
