// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmseb/bounds.hpp"
#include "mmseb/experiments.hpp"
#include "mmseb/mmse.hpp"
#include "mmseb/verify.hpp"

using namespace mmseb;

namespace {

constexpr std::uint64_t kSeed = 42;

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (passed) detail << "first failure: " << what << "; ";
    passed = false;
  }
};

JointModel gaussian_joint(std::shared_ptr<const PriorModel> prior, double s2) {
  const std::size_t k = prior->dim();
  return JointModel(std::move(prior), std::make_shared<GaussianChannel>(s2, k));
}

std::string describe(const McEstimate& est) {
  std::ostringstream out;
  out.precision(6);
  out << est.value << " +- " << est.std_error;
  return out.str();
}

Outcome gamma_example() {
  Outcome out;
  const std::vector<std::pair<double, double>> params = {{1, 1}, {2, 3}, {0.5, 2}};
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto [a, b] = params[i];
    const double exact = mmse_gamma_example(a, b);
    const JointModel joint(std::make_shared<GammaPrior>(a, b), std::make_shared<GammaVarianceChannel>());
    const McOptions opts{1'000'000, split_seed(kSeed, i), 1};
    const auto t1 = mmse_theorem1_mc(joint, opts).estimate;
    const auto cl = mmse_classical_mc(joint, {opts.n, split_seed(kSeed, 10 + i), 1});
    std::ostringstream where;
    where << "(" << a << "," << b << ")";
    out.require(std::abs(t1.value - exact) <= 3.0 * t1.std_error, where.str() + " score route");
    out.require(std::abs(cl.value - exact) <= 3.0 * cl.std_error, where.str() + " classical route");
    out.detail << where.str() << " exact " << exact << " score " << describe(t1) << " classical "
               << describe(cl) << "; ";
  }
  out.require(std::abs(mmse_gamma_example(1, 1) - 0.8) < 1e-15, "(1,1) closed form is 0.8");
  return out;
}

Outcome gaussian_reference() {
  Outcome out;
  const Matrix cov = reference_covariance_6d();
  const auto prior = std::make_shared<GaussianPrior>(cov);
  const auto grid = default_sigma_grid();
  double worst = 0.0;
  for (std::size_t r = 0; r < grid.size(); ++r) {
    const double s2 = grid[r];
    const auto joint = gaussian_joint(prior, s2);
    const double exact = mmse_gaussian_closed_form(cov, s2);
    const auto t1 = mmse_theorem1_mc(joint, {500'000, split_seed(kSeed, 2 * r), 1}).estimate;
    BoundOptions bo;
    bo.seed = split_seed(kSeed, 2 * r + 1);
    const auto lb = poincare_lb_gaussian(joint, bo);
    const double cr = cramer_rao_bound(joint);
    const std::string at = "sigma2_n=" + std::to_string(s2);
    worst = std::max(worst, std::abs(t1.value - exact) / t1.std_error);
    out.require(std::abs(t1.value - exact) <= 3.0 * t1.std_error, at + " score route");
    out.require(lb.value <= exact + 3.0 * lb.std_error, at + " lower bound");
    out.require(cr <= exact, at + " Cramer-Rao");
  }
  out.detail << "12 points, worst |score - exact| / SE = " << worst;
  return out;
}

Outcome high_noise_tightness() {
  Outcome out;
  struct Case {
    std::string name;
    std::shared_ptr<const PriorModel> prior;
    double target;
  };
  const std::vector<Case> cases = {
      {"N(0,1)", std::make_shared<GaussianPrior>(Matrix::Identity(1, 1)), 1.0},
      {"BPSK", std::make_shared<BpskPrior>(), 1.0},
      {"Sparse(0.4)", std::make_shared<SparsePrior>(0.4), 0.4},
      {"6x6 reference", std::make_shared<GaussianPrior>(reference_covariance_6d()), 44.43}};
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    BoundOptions bo;
    bo.seed = split_seed(kSeed, 20 + i);
    bo.control_variate = true;
    const auto lb = poincare_lb_gaussian(gaussian_joint(c.prior, 1e3), bo);
    const double ratio = lb.value / c.target;
    out.require(ratio >= 0.95 && ratio <= 1.05, c.name);
    out.detail << c.name << " " << ratio << "; ";
  }
  return out;
}

Outcome bpsk() {
  Outcome out;
  const auto prior = std::make_shared<BpskPrior>();
  for (std::size_t r = 0; const double s2 : {0.1, 1.0, 10.0, 100.0, 1000.0}) {
    const auto joint = gaussian_joint(prior, s2);
    const double quad = mmse_bpsk(s2);
    const auto cl = mmse_classical_mc(joint, {500'000, split_seed(kSeed, 30 + r), 1});
    BoundOptions bo;
    bo.seed = split_seed(kSeed, 40 + r);
    const auto lb = poincare_lb_gaussian(joint, bo);
    const std::string at = "sigma2_n=" + std::to_string(s2);
    out.require(std::abs(cl.value - quad) <= 3.0 * cl.std_error, at + " classical vs quadrature");
    out.require(lb.value <= quad, at + " lower bound");
    out.detail << s2 << ": quad " << quad << " classical " << describe(cl) << " lb " << describe(lb)
               << "; ";
    ++r;
  }
  return out;
}

const SuiteResult& find_suite(const VerifyReport& report, const std::string& name) {
  for (const auto& s : report.suites)
    if (s.name == name) return s;
  throw std::runtime_error("missing suite " + name);
}

Outcome suites(const VerifyReport& report, const std::vector<std::string>& names) {
  Outcome out;
  for (const auto& name : names) {
    const auto& s = find_suite(report, name);
    out.require(s.passed, name + " (" + s.detail + ")");
    out.detail << name << " " << s.checks - s.failures << "/" << s.checks << " worst " << s.worst << "; ";
  }
  return out;
}

Outcome constants() {
  Outcome out;
  const double eps = std::numeric_limits<double>::epsilon();
  double worst_grid = 0.0;
  for (const double s2 : {1e-3, 0.1, 1.0, 7.5, 1e3}) {
    for (const std::size_t k : {std::size_t{1}, std::size_t{3}}) {
      const GaussianChannel ch(s2, k);
      const Vector x = Vector::Constant(k, 0.3);
      out.require(std::abs(bakry_emery_constant(ch, x) - 1.0 / s2) <= 2.0 * eps / s2, "gaussian kappa");
      out.require(std::abs(rho(ch) - s2) <= 2.0 * eps * s2, "gaussian rho");
      const auto grid = ch.default_y_grid(k == 1 ? 2001 : 200);
      const double kg = bakry_emery_constant_on_grid(ch, x, grid);
      const double rg = rho_on_grid(ch, grid);
      worst_grid = std::max({worst_grid, std::abs(kg - 1.0 / s2), std::abs(rg - s2)});
      out.require(std::abs(kg - 1.0 / s2) <= 1e-6, "gaussian kappa grid");
      out.require(std::abs(rg - s2) <= 1e-6, "gaussian rho grid");
    }
  }
  const GammaVarianceChannel gv;
  const auto grid = gv.default_y_grid(10'000);
  out.require(rho(gv) == 0.0, "gamma-variance rho");
  for (const double x : {1e-3, 0.5, 1.0, 2.0, 40.0}) {
    const Vector xv = Vector::Constant(1, x);
    out.require(std::abs(bakry_emery_constant(gv, xv) - 2.0 * x) <= 2.0 * eps * x, "gamma-variance kappa");
    const double kg = bakry_emery_constant_on_grid(gv, xv, grid);
    worst_grid = std::max(worst_grid, std::abs(kg - 2.0 * x));
    out.require(std::abs(kg - 2.0 * x) <= 1e-6, "gamma-variance kappa grid");
  }
  const double rg = rho_on_grid(gv, grid);
  worst_grid = std::max(worst_grid, rg);
  out.require(rg <= 1e-6, "gamma-variance rho grid");
  out.detail << "worst grid deviation " << worst_grid;
  return out;
}

Outcome isotropic_cramer_rao() {
  Outcome out;
  double worst = 0.0;
  const std::size_t k = 4;
  for (const double sx : {0.01, 0.3, 1.0, 5.0, 100.0}) {
    for (const double sn : {0.01, 0.3, 1.0, 5.0, 100.0}) {
      const Matrix cov = sx * Matrix::Identity(k, k);
      const double cr = cramer_rao_gaussian(gaussian_prior_fisher(cov), k, sn);
      const double exact = mmse_gaussian_closed_form(cov, sn);
      const double rel = std::abs(cr - exact) / exact;
      worst = std::max(worst, rel);
      out.require(rel <= 1e-10, "sigma_x2=" + std::to_string(sx) + " sigma_n2=" + std::to_string(sn));
    }
  }
  out.detail << "worst relative gap " << worst;
  return out;
}

}  // namespace

int main() {
  VerifyConfig vc;
  vc.seed = kSeed;
  vc.sweep_seeds = 20;
  vc.sweep_outer = 2'000;
  vc.sweep_inner = 2'000;
  std::optional<VerifyReport> report;
  const auto verification = [&]() -> const VerifyReport& {
    if (!report) report = run_verification(vc);
    return *report;
  };

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 gamma example: both routes match the closed form", gamma_example},
      {"2 Gaussian 6x6 reference: score route, lower bound and Cramer-Rao", gaussian_reference},
      {"3 high-noise tightness at sigma2_n = 1e3", high_noise_tightness},
      {"4 BPSK: quadrature vs classical MC, lb <= mmse", bpsk},
      {"5 identity suites on 1e3 points per joint",
       [&] { return suites(verification(), {"tweedie_identity", "gradient_identity",
                                            "gradient_finite_difference"}); }},
      {"6 constant exactness", constants},
      {"7 soundness sweep: 20 seeds x 12 points x 3 joints",
       [&] { return suites(verification(), {"soundness"}); }},
      {"8 isotropic Cramer-Rao equals the closed form", isotropic_cramer_rao},
  };

  bool all = true;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = run();
    } catch (const std::exception& e) {
      out.passed = false;
      out.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %s [%.1fs] %s\n", out.passed ? "PASS" : "FAIL", name.c_str(), secs,
                out.detail.str().c_str());
    std::fflush(stdout);
    all = all && out.passed;
  }
  return all ? 0 : 1;
}
