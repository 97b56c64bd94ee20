#include "mmseb/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "mmseb/bounds.hpp"
#include "mmseb/errors.hpp"
#include "mmseb/experiments.hpp"
#include "mmseb/mmse.hpp"
#include "mmseb/quadrature.hpp"

namespace mmseb {
namespace {

constexpr double kIdentityTol = 1e-8;
constexpr double kFdTol = 1e-5;
constexpr double kNormalizationTol = 1e-8;
constexpr double kRouteSe = 3.0;

std::string label(const JointModel& joint) {
  return joint.prior().name() + "+" + joint.channel().name();
}

void record(SuiteResult& suite, double deviation, double tolerance, const std::string& where) {
  ++suite.checks;
  const double normalized = tolerance > 0.0 ? deviation / tolerance : deviation;
  if (!std::isfinite(normalized) || normalized > 1.0) {
    ++suite.failures;
    if (suite.failures <= 3) {
      if (!suite.detail.empty()) suite.detail += "; ";
      suite.detail += where;
    }
  }
  if (!std::isfinite(normalized))
    suite.worst = normalized;
  else if (std::isfinite(suite.worst))
    suite.worst = std::max(suite.worst, normalized);
}

void finish(SuiteResult& suite) { suite.passed = suite.failures == 0; }

// Joint draws at which the Jacobian has full column rank.
template <class Body>
void for_each_point(const JointModel& joint, std::size_t n, std::uint64_t seed, const Body& body) {
  Rng rng(seed);
  std::size_t used = 0;
  for (std::size_t attempt = 0; used < n && attempt < 10 * n; ++attempt) {
    auto [x, y] = joint.sample(rng);
    if (!has_full_column_rank(joint.channel().jacobian_T(y))) continue;
    body(x, y);
    ++used;
  }
}

SuiteResult tweedie_suite(const VerifyConfig& cfg, const std::vector<JointModel>& joints) {
  SuiteResult suite;
  suite.name = "tweedie_identity";
  for (std::size_t j = 0; j < joints.size(); ++j) {
    const JointModel& joint = joints[j];
    if (!joint.has_closed_form()) continue;
    const std::string name = label(joint);
    for_each_point(joint, cfg.identity_points, split_seed(cfg.seed, 100 + j),
                   [&](const Vector& /*x*/, const Vector& y) {
                     const Vector score = tweedie_score(joint, y);
                     const Vector m = cond_mean_tweedie(joint, y);
                     const double dev = (joint.channel().jacobian_T(y) * m - score).norm();
                     record(suite, dev, kIdentityTol * std::max(1.0, score.norm()), name);
                   });
    // The conditional mean itself, against importance sampling over the prior.
    Rng rng(split_seed(cfg.seed, 200 + j));
    for (int p = 0; p < 5; ++p) {
      const Vector y = joint.sample(rng).second;
      if (!has_full_column_rank(joint.channel().jacobian_T(y))) continue;
      ImportanceEstimate imp;
      try {
        imp = cond_mean_importance(joint, y, 20'000, rng);
      } catch (const DegenerateWeights&) {
        continue;
      }
      if (imp.effective_sample_size < 1000.0) continue;
      const Vector m = cond_mean_tweedie(joint, y);
      for (Eigen::Index i = 0; i < m.size(); ++i)
        record(suite, std::abs(m(i) - imp.mean(i)), 5.0 * imp.std_error(i) + 1e-9,
               name + " posterior mean");
    }
  }
  finish(suite);
  return suite;
}

SuiteResult prop2_suite(const VerifyConfig& cfg, const std::vector<JointModel>& joints) {
  SuiteResult suite;
  suite.name = "gradient_identity";
  for (std::size_t j = 0; j < joints.size(); ++j) {
    const JointModel& joint = joints[j];
    if (!joint.has_closed_form()) continue;
    const std::string name = label(joint);
    for_each_point(joint, cfg.identity_points, split_seed(cfg.seed, 300 + j),
                   [&](const Vector& x, const Vector& y) {
                     const Vector direct = grad_y_info_density(joint, x, y);
                     const Vector via = grad_y_info_density_via_posterior_mean(joint, x, y);
                     record(suite, (direct - via).norm(),
                            kIdentityTol * std::max(1.0, direct.norm()), name);
                   });
  }
  finish(suite);
  return suite;
}

SuiteResult finite_difference_suite(const VerifyConfig& cfg,
                                    const std::vector<JointModel>& joints) {
  SuiteResult suite;
  suite.name = "gradient_finite_difference";
  for (std::size_t j = 0; j < joints.size(); ++j) {
    const JointModel& joint = joints[j];
    if (!joint.has_closed_form()) continue;
    const std::string name = label(joint);
    for_each_point(joint, cfg.identity_points, split_seed(cfg.seed, 400 + j),
                   [&](const Vector& x, const Vector& y) {
                     const Vector g = grad_y_info_density(joint, x, y);
                     for (Eigen::Index i = 0; i < y.size(); ++i) {
                       const double h = 1e-5 * std::max(1.0, std::abs(y(i)));
                       Vector yp = y, ym = y;
                       yp(i) += h;
                       ym(i) -= h;
                       const double fd =
                           (info_density(joint, x, yp) - info_density(joint, x, ym)) / (2.0 * h);
                       record(suite, std::abs(fd - g(i)), kFdTol * std::max(1.0, std::abs(g(i))),
                              name);
                     }
                   });
  }
  finish(suite);
  return suite;
}

SuiteResult normalization_suite(const VerifyConfig& cfg, const std::vector<JointModel>& joints) {
  SuiteResult suite;
  suite.name = "normalization";
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < joints.size(); ++j) {
    const JointModel& joint = joints[j];
    if (joint.channel().output_dim() != 1) continue;
    const std::string name = label(joint);
    Rng rng(split_seed(cfg.seed, 500 + j));
    for (int p = 0; p < 10; ++p) {
      const Vector x = joint.prior().sample(rng);
      const auto density = [&](double t) {
        return std::exp(joint.channel().log_cond_pdf(x, Vector::Constant(1, t)));
      };
      double total = 0.0;
      try {
        total = integrate_1d(density, -inf, inf, {1e-12, 1e-12, 20});
      } catch (const ToleranceNotMet&) {
        total = std::numeric_limits<double>::quiet_NaN();
      }
      record(suite, std::abs(total - 1.0), kNormalizationTol, name);
    }
  }
  finish(suite);
  return suite;
}

SuiteResult constants_suite(const VerifyConfig& cfg) {
  SuiteResult suite;
  suite.name = "constants";
  constexpr double eps = std::numeric_limits<double>::epsilon();
  Rng rng(split_seed(cfg.seed, 600));
  for (int p = 0; p < 1000; ++p) {
    const double s2 = std::pow(10.0, -3.0 + 6.0 * rng.uniform());
    const std::size_t k = 1 + static_cast<std::size_t>(6.0 * rng.uniform()) % 6;
    const GaussianChannel channel(s2, k);
    Vector x(k);
    for (std::size_t i = 0; i < k; ++i) x(i) = 3.0 * rng.normal();
    record(suite, std::abs(bakry_emery_constant(channel, x) - 1.0 / s2), 4.0 * eps / s2,
           "gaussian kappa");
    record(suite, std::abs(rho(channel) - s2), 4.0 * eps * s2, "gaussian rho");
    const GammaVarianceChannel gamma;
    const double xg = std::exp(2.0 * rng.normal());
    const Vector xv = Vector::Constant(1, xg);
    record(suite, std::abs(bakry_emery_constant(gamma, xv) - 2.0 * xg), 4.0 * eps * xg,
           "gamma-variance kappa");
  }
  // Grid paths, with finite-difference Hessians, against the closed forms.
  for (const double s2 : {0.1, 1.0, 10.0}) {
    for (const std::size_t k : {std::size_t{1}, std::size_t{3}}) {
      const GaussianChannel channel(s2, k);
      const auto grid = channel.default_y_grid(200);
      const Vector x = Vector::Constant(static_cast<Eigen::Index>(k), 0.3);
      const double kappa =
          bakry_emery_constant_on_grid(channel, x, grid, HessianSource::kFiniteDifference);
      record(suite, std::abs(kappa - 1.0 / s2), 1e-4 / s2, "gaussian kappa grid");
      record(suite, std::abs(rho_on_grid(channel, grid) - s2), 1e-10 * s2, "gaussian rho grid");
    }
  }
  const GammaVarianceChannel gamma;
  const auto grid = gamma.default_y_grid(2000);
  for (const double xg : {0.1, 1.0, 5.0}) {
    const double kappa = bakry_emery_constant_on_grid(gamma, Vector::Constant(1, xg), grid,
                                                      HessianSource::kFiniteDifference);
    record(suite, std::abs(kappa - 2.0 * xg), 1e-4 * std::max(1.0, 2.0 * xg),
           "gamma-variance kappa grid");
  }
  record(suite, rho_on_grid(gamma, grid), 1e-6, "gamma-variance rho grid");
  finish(suite);
  return suite;
}

JointModel gaussian_joint(std::shared_ptr<const PriorModel> prior, double s2) {
  const std::size_t dim = prior->dim();
  return JointModel(std::move(prior), std::make_shared<GaussianChannel>(s2, dim));
}

SuiteResult route_suite(const VerifyConfig& cfg) {
  SuiteResult suite;
  suite.name = "route_agreement";
  const std::size_t n = cfg.route_samples;
  std::uint64_t stream = 700;
  auto check = [&](const McEstimate& est, double exact, const std::string& where) {
    record(suite, std::abs(est.value - exact), kRouteSe * est.std_error, where);
  };
  auto opts = [&] { return McOptions{n, split_seed(cfg.seed, stream++), cfg.workers}; };

  const auto scalar = gaussian_joint(std::make_shared<GaussianPrior>(Matrix::Identity(1, 1)), 1.0);
  check(mmse_classical_mc(scalar, opts()), 0.5, "gaussian classical");
  check(mmse_theorem1_mc(scalar, opts()).estimate, 0.5, "gaussian theorem1");

  const Matrix cov = reference_covariance_6d();
  const auto six = gaussian_joint(std::make_shared<GaussianPrior>(cov), 1.0);
  check(mmse_theorem1_mc(six, opts()).estimate, mmse_gaussian_closed_form(cov, 1.0),
        "6d gaussian score route");

  const auto bpsk = gaussian_joint(std::make_shared<BpskPrior>(), 1.0);
  check(mmse_classical_mc(bpsk, opts()), mmse_bpsk(1.0), "bpsk classical");
  check(mmse_theorem1_mc(bpsk, opts()).estimate, mmse_bpsk(1.0), "bpsk theorem1");

  for (const auto& [a, b] : {std::pair{1.0, 1.0}, std::pair{2.0, 3.0}}) {
    const JointModel gamma(std::make_shared<GammaPrior>(a, b),
                           std::make_shared<GammaVarianceChannel>());
    check(mmse_theorem1_mc(gamma, opts()).estimate, mmse_gamma_example(a, b), "gamma theorem1");
    check(mmse_classical_mc(gamma, opts()), mmse_gamma_example(a, b), "gamma classical");
  }
  finish(suite);
  return suite;
}

SuiteResult soundness_suite(const VerifyConfig& cfg) {
  SuiteResult suite;
  suite.name = "soundness";
  const auto grid = default_sigma_grid();
  const Matrix cov = reference_covariance_6d();
  const std::vector<std::shared_ptr<const PriorModel>> priors = {
      std::make_shared<GaussianPrior>(cov), std::make_shared<BpskPrior>(),
      std::make_shared<SparsePrior>(0.4)};
  for (std::size_t s = 0; s < std::max<std::size_t>(1, cfg.sweep_seeds); ++s) {
    const std::uint64_t seed = cfg.seed + s;
    for (std::size_t p = 0; p < priors.size(); ++p) {
      for (std::size_t r = 0; r < grid.size(); ++r) {
        const auto joint = gaussian_joint(priors[p], grid[r]);
        McEstimate mmse;
        if (p == 0) {
          mmse.value = mmse_gaussian_closed_form(cov, grid[r]);
        } else if (p == 1) {
          mmse.value = mmse_bpsk(grid[r]);
        } else {
          mmse = mmse_theorem1_mc(joint, {cfg.route_samples, split_seed(seed, 2 * r), cfg.workers})
                     .estimate;
        }
        BoundOptions bo;
        bo.n_outer = cfg.sweep_outer;
        bo.n_inner = cfg.sweep_inner;
        bo.seed = split_seed(seed, 2 * r + 1);
        bo.workers = cfg.workers;
        const McEstimate lb = poincare_lb_gaussian(joint, bo);
        std::ostringstream where;
        where << priors[p]->name() << " sigma2=" << grid[r] << " seed=" << seed;
        const double excess = std::max(0.0, lb.value - mmse.value);
        record(suite, excess, 3.0 * std::hypot(lb.std_error, mmse.std_error), where.str());
      }
    }
  }
  finish(suite);
  return suite;
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed; });
}

std::string VerifyReport::to_json() const {
  nlohmann::json doc;
  doc["seed"] = seed;
  doc["passed"] = passed();
  doc["suites"] = nlohmann::json::array();
  for (const auto& s : suites) {
    nlohmann::json entry = {{"name", s.name},         {"passed", s.passed},
                            {"checks", s.checks},     {"failures", s.failures},
                            {"detail", s.detail}};
    if (std::isfinite(s.worst))
      entry["worst"] = s.worst;
    else
      entry["worst"] = nullptr;
    doc["suites"].push_back(std::move(entry));
  }
  return doc.dump(2);
}

std::vector<JointModel> builtin_joints() {
  std::vector<JointModel> joints;
  joints.push_back(gaussian_joint(std::make_shared<GaussianPrior>(Matrix::Identity(1, 1)), 1.0));
  joints.push_back(gaussian_joint(std::make_shared<GaussianPrior>(reference_covariance_6d()), 1.0));
  joints.push_back(gaussian_joint(std::make_shared<BpskPrior>(), 1.0));
  joints.push_back(gaussian_joint(std::make_shared<SparsePrior>(0.4), 1.0));
  joints.emplace_back(std::make_shared<GammaPrior>(1.0, 1.0),
                      std::make_shared<GammaVarianceChannel>());
  joints.emplace_back(std::make_shared<GammaPrior>(2.0, 3.0),
                      std::make_shared<GammaVarianceChannel>());
  joints.push_back(
      gaussian_joint(std::make_shared<PointMassPrior>(Vector::Constant(1, 0.7)), 1.0));
  return joints;
}

VerifyReport verify_joints(const VerifyConfig& config, const std::vector<JointModel>& joints) {
  VerifyReport report;
  report.seed = config.seed;
  report.suites.push_back(tweedie_suite(config, joints));
  report.suites.push_back(prop2_suite(config, joints));
  report.suites.push_back(finite_difference_suite(config, joints));
  report.suites.push_back(normalization_suite(config, joints));
  return report;
}

VerifyReport run_verification(const VerifyConfig& config) {
  VerifyReport report = verify_joints(config, builtin_joints());
  report.suites.push_back(constants_suite(config));
  report.suites.push_back(route_suite(config));
  report.suites.push_back(soundness_suite(config));
  return report;
}

}  // namespace mmseb
