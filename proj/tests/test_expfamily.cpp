#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mmseb/errors.hpp"
#include "mmseb/expfamily.hpp"
#include "mmseb/montecarlo.hpp"
#include "oracles.hpp"

using namespace mmseb;

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

oracle::Dense to_dense(const Matrix& a) {
  oracle::Dense d = oracle::zeros(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) d[i][j] = a(i, j);
  return d;
}

}  // namespace

TEST_CASE("Gaussian channel density matches N(x, sigma2 I)") {
  Rng rng(1);
  for (const double s2 : {0.05, 1.0, 30.0}) {
    for (const std::size_t k : {std::size_t{1}, std::size_t{4}}) {
      const GaussianChannel ch(s2, k);
      oracle::Dense cov = oracle::zeros(k, k);
      for (std::size_t i = 0; i < k; ++i) cov[i][i] = s2;
      for (int p = 0; p < 20; ++p) {
        Vector x(k), y(k);
        for (std::size_t i = 0; i < k; ++i) x(i) = rng.normal(), y(i) = 3.0 * rng.normal();
        const double ref = oracle::gaussian_log_density(to_std(y), to_std(x), cov);
        CHECK(ch.log_cond_pdf(x, y) == doctest::Approx(ref).epsilon(1e-12));
        // The generic (h, T, phi) route.
        CHECK(ch.ChannelModel::log_cond_pdf(x, y) == doctest::Approx(ref).epsilon(1e-12));
        const Vector g = ch.grad_y_log_cond_pdf(x, y);
        CHECK((g - (x - y) / s2).norm() < 1e-12 * std::max(1.0, g.norm()));
      }
    }
  }
}

TEST_CASE("Gaussian channel shape contract and errors") {
  const GaussianChannel ch(2.0, 3);
  CHECK(ch.input_dim() == 3);
  CHECK(ch.output_dim() == 3);
  CHECK(ch.jacobian_T(Vector::Zero(3)).isApprox(Matrix::Identity(3, 3) / 2.0));
  CHECK_THROWS_AS(GaussianChannel(0.0, 1), InvalidArgument);
  CHECK_THROWS_AS(GaussianChannel(-1.0, 1), InvalidArgument);
  CHECK_THROWS_AS(GaussianChannel(1.0, 0), InvalidArgument);
  CHECK_THROWS_AS(ch.log_cond_pdf(Vector::Zero(2), Vector::Zero(3)), InvalidArgument);
  Vector bad = Vector::Zero(3);
  bad(1) = NAN;
  CHECK_THROWS_AS(ch.log_cond_pdf(bad, Vector::Zero(3)), DomainError);
}

TEST_CASE("Gaussian channel sampler has the right moments") {
  const GaussianChannel ch(4.0, 1);
  const Vector x = Vector::Constant(1, 0.7);
  const auto mean = mc_mean([&](Rng& rng) { return ch.sample_given_x(x, rng)(0); }, 100'000, 3);
  const auto var = mc_variance([&](Rng& rng) { return ch.sample_given_x(x, rng)(0); }, 100'000, 4);
  CHECK(std::abs(mean.value - 0.7) < 4.0 * mean.std_error);
  CHECK(std::abs(var.value - 4.0) < 4.0 * var.std_error);
}

TEST_CASE("gamma-variance channel is sqrt(x/pi) exp(-x y^2)") {
  const GammaVarianceChannel ch;
  for (const double x : {0.01, 0.5, 3.0}) {
    for (const double y : {-4.0, -0.1, 0.0, 2.5}) {
      const Vector xv = Vector::Constant(1, x), yv = Vector::Constant(1, y);
      CHECK(ch.log_cond_pdf(xv, yv) ==
            doctest::Approx(0.5 * std::log(x / std::numbers::pi) - x * y * y).epsilon(1e-13));
      CHECK(ch.sufficient_statistic(yv)(0) == -y * y);
      CHECK(ch.jacobian_T(yv)(0, 0) == -2.0 * y);
      CHECK(ch.grad_y_log_cond_pdf(xv, yv)(0) == doctest::Approx(-2.0 * x * y));
    }
  }
  CHECK_THROWS_AS(ch.log_cond_pdf(Vector::Constant(1, 0.0), Vector::Zero(1)), DomainError);
  CHECK_THROWS_AS(ch.log_cond_pdf(Vector::Constant(1, -1.0), Vector::Zero(1)), DomainError);
  const Vector x = Vector::Constant(1, 2.0);
  const auto var = mc_variance([&](Rng& rng) { return ch.sample_given_x(x, rng)(0); }, 200'000, 8);
  CHECK(std::abs(var.value - 0.25) < 4.0 * var.std_error);
}

TEST_CASE("finite-difference potential Hessian matches the closed forms") {
  const GaussianChannel g(0.3, 3);
  const Vector x = Vector::Constant(3, 0.4);
  Vector y(3);
  y << 1.0, -2.0, 0.5;
  CHECK((g.finite_difference_potential_hessian(x, y) - g.potential_hessian(x, y)).norm() < 1e-4);
  const GammaVarianceChannel gv;
  for (const double yy : {-3.0, 0.0, 1e-3, 40.0}) {
    const Vector xv = Vector::Constant(1, 1.7), yv = Vector::Constant(1, yy);
    CHECK(gv.finite_difference_potential_hessian(xv, yv)(0, 0) == doctest::Approx(3.4).epsilon(1e-5));
  }
}

TEST_CASE("default grids") {
  const GaussianChannel g1(4.0, 1);
  const auto grid = g1.default_y_grid(101);
  REQUIRE(grid.size() == 101);
  CHECK(grid.front()(0) == doctest::Approx(-20.0));
  CHECK(grid.back()(0) == doctest::Approx(20.0));
  const GammaVarianceChannel gv;
  const auto gg = gv.default_y_grid(100);
  CHECK(gg.size() == 100);
  for (const auto& y : gg) CHECK(y(0) != 0.0);
  CHECK(GaussianChannel(1.0, 3).default_y_grid(50).size() == 50);
}

TEST_CASE("Gaussian prior moments, density and factorization") {
  const Matrix cov = reference_covariance_6d();
  const GaussianPrior prior(cov);
  CHECK(prior.dim() == 6);
  CHECK(prior.trace_covariance() == doctest::Approx(44.43));
  Rng rng(5);
  Vector x(6);
  for (int i = 0; i < 6; ++i) x(i) = rng.normal();
  const double ref = oracle::gaussian_log_density(to_std(x), std::vector<double>(6, 0.0), to_dense(cov));
  CHECK(*prior.log_density(x) == doctest::Approx(ref).epsilon(1e-11));
  const std::size_t n = 200'000;
  const auto c04 = mc_mean([&](Rng& r) {
    const Vector s = prior.sample(r);
    return s(0) * s(4);
  }, n, 6);
  CHECK(std::abs(c04.value - cov(0, 4)) < 4.0 * c04.std_error);
  const auto tr = mc_mean([&](Rng& r) { return prior.sample(r).squaredNorm(); }, n, 7);
  CHECK(std::abs(tr.value - 44.43) < 4.0 * tr.std_error);
}

TEST_CASE("Gaussian prior validation") {
  Matrix indefinite(2, 2);
  indefinite << 1, 2, 2, 1;
  CHECK_THROWS_AS(GaussianPrior{indefinite}, NotPSD);
  Matrix singular(2, 2);
  singular << 1, 1, 1, 1;
  const GaussianPrior degenerate(singular);
  CHECK_FALSE(degenerate.log_density(Vector::Zero(2)).has_value());
  Rng rng(1);
  const Vector s = degenerate.sample(rng);
  CHECK(s(0) == doctest::Approx(s(1)).epsilon(1e-12));
  CHECK_THROWS_AS(GaussianPrior(Matrix::Identity(2, 2), Vector::Zero(3)), InvalidArgument);
}

TEST_CASE("reference 6x6 covariance") {
  const Matrix cov = reference_covariance_6d();
  CHECK((cov - cov.transpose()).norm() == 0.0);
  CHECK(cov(1, 2) == doctest::Approx(3.095));
  CHECK(cov(0, 0) == 5.88);
  CHECK(cov(4, 4) == 13.23);
  CHECK(cov.trace() == doctest::Approx(44.43).epsilon(1e-14));
  // Golden from numpy.linalg.eigvalsh on the symmetrized table.
  CHECK(smallest_eigenvalue(cov) == doctest::Approx(0.06280249123533159).epsilon(1e-10));
  const auto ev = oracle::jacobi_eigenvalues(to_dense(cov));
  CHECK(ev.back() == doctest::Approx(20.68255086).epsilon(1e-8));
}

TEST_CASE("discrete and mixed priors") {
  const BpskPrior bpsk;
  Rng rng(2);
  int plus = 0;
  for (int i = 0; i < 10'000; ++i) {
    const double v = bpsk.sample(rng)(0);
    CHECK((v == 1.0 || v == -1.0));
    plus += v > 0;
  }
  CHECK(std::abs(plus - 5000) < 4 * 50);
  CHECK_FALSE(bpsk.log_density(Vector::Zero(1)).has_value());

  const SparsePrior sparse(0.4);
  CHECK(sparse.trace_covariance() == 0.4);
  const auto zeros = mc_mean([&](Rng& r) { return sparse.sample(r)(0) == 0.0 ? 1.0 : 0.0; }, 100'000, 3);
  CHECK(std::abs(zeros.value - 0.6) < 4.0 * zeros.std_error);
  const auto second = mc_mean([&](Rng& r) { return std::pow(sparse.sample(r)(0), 2); }, 100'000, 4);
  CHECK(std::abs(second.value - 0.4) < 4.0 * second.std_error);
  CHECK_THROWS_AS(SparsePrior(1.5), InvalidArgument);
  CHECK_THROWS_AS(SparsePrior(-0.1), InvalidArgument);

  const PointMassPrior pm(Vector::Constant(2, 0.7));
  CHECK(pm.sample(rng) == Vector::Constant(2, 0.7));
  CHECK(pm.trace_covariance() == 0.0);
}

TEST_CASE("gamma prior") {
  const GammaPrior prior(2.0, 3.0);
  CHECK(prior.mean()(0) == doctest::Approx(2.0 / 3.0));
  CHECK(prior.trace_covariance() == doctest::Approx(2.0 / 9.0));
  const auto m = mc_mean([&](Rng& r) { return prior.sample(r)(0); }, 200'000, 1);
  CHECK(std::abs(m.value - 2.0 / 3.0) < 4.0 * m.std_error);
  // 9 x e^{-3x} at x = 1.
  CHECK(*prior.log_density(Vector::Constant(1, 1.0)) == doctest::Approx(std::log(9.0) - 3.0));
  CHECK(std::isinf(*prior.log_density(Vector::Constant(1, -1.0))));
  CHECK_THROWS_AS(GammaPrior(0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(GammaPrior(1.0, -1.0), InvalidArgument);
}
