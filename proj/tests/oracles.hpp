#pragma once

// Independent reference implementations used only by the tests. None of them
// route through the library's Eigen or Boost backends.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense zeros(std::size_t r, std::size_t c) { return Dense(r, std::vector<double>(c, 0.0)); }

inline Dense transpose(const Dense& a) {
  Dense t = zeros(a[0].size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
  return t;
}

inline Dense multiply(const Dense& a, const Dense& b) {
  Dense c = zeros(a.size(), b[0].size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

/// Gauss-Jordan inverse with partial pivoting; also returns log|det|.
inline Dense inverse(Dense a, double* log_abs_det = nullptr) {
  const std::size_t n = a.size();
  Dense inv = zeros(n, n);
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  double logdet = 0.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (a[piv][col] == 0.0) throw std::runtime_error("singular");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    const double p = a[col][col];
    logdet += std::log(std::abs(p));
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= p;
      inv[col][j] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  if (log_abs_det) *log_abs_det = logdet;
  return inv;
}

/// (A^T A)^{-1} A^T.
inline Dense pinv_normal_equations(const Dense& a) {
  const Dense at = transpose(a);
  return multiply(inverse(multiply(at, a)), at);
}

/// Cyclic Jacobi eigenvalues of a symmetric matrix, ascending.
inline std::vector<double> jacobi_eigenvalues(Dense a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

/// Singular values of A as square roots of the eigenvalues of A^T A, ascending.
inline std::vector<double> singular_values(const Dense& a) {
  auto ev = jacobi_eigenvalues(multiply(transpose(a), a));
  for (double& v : ev) v = std::sqrt(std::max(0.0, v));
  return ev;
}

/// log N(y; mean, cov), by Gauss-Jordan.
inline double gaussian_log_density(const std::vector<double>& y, const std::vector<double>& mean,
                                   const Dense& cov) {
  double logdet = 0.0;
  const Dense prec = inverse(cov, &logdet);
  const std::size_t k = y.size();
  double quad = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) quad += (y[i] - mean[i]) * prec[i][j] * (y[j] - mean[j]);
  return -0.5 * (static_cast<double>(k) * std::log(2.0 * std::numbers::pi) + logdet + quad);
}

/// sigma2 E[Var(iota | X)] for X ~ N(0, Sigma) through N(0, sigma2 I), from the
/// eigenvalues of Sigma: sum_i sigma2 l_i (l_i / 2 + sigma2) / (l_i + sigma2)^2.
inline double gaussian_lower_bound(const std::vector<double>& eigenvalues, double s2) {
  double total = 0.0;
  for (double l : eigenvalues) total += s2 * l * (0.5 * l + s2) / ((l + s2) * (l + s2));
  return total;
}

/// Var(Z^2 / 2 + log g(x + sigma Z)) for scalar X ~ N(0, 1), where g is the
/// N(0, 1 + s2) output density. Uses its own 32-bit engine.
struct VarianceWithError {
  double value;
  double std_error;
};

inline VarianceWithError scalar_gaussian_cond_info_variance(double x, double s2, std::size_t n,
                                                            std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  const double sigma = std::sqrt(s2);
  std::vector<double> v(n);
  for (auto& s : v) {
    const double zi = z(gen);
    const double y = x + sigma * zi;
    const double log_g = -0.5 * std::log(2.0 * std::numbers::pi * (1.0 + s2)) - y * y / (2.0 * (1.0 + s2));
    s = 0.5 * zi * zi + log_g;
  }
  double mean = 0.0;
  for (double s : v) mean += s;
  mean /= static_cast<double>(n);
  double m2 = 0.0, m4 = 0.0;
  for (double s : v) {
    const double d = (s - mean) * (s - mean);
    m2 += d;
    m4 += d * d;
  }
  const double var = m2 / static_cast<double>(n - 1);
  m4 /= static_cast<double>(n);
  return {var, std::sqrt(std::max(0.0, m4 - var * var) / static_cast<double>(n))};
}

/// Composite Simpson rule on [a, b] with `panels` (even) panels.
template <class F>
double simpson(const F& f, double a, double b, std::size_t panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / static_cast<double>(panels);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
  return s * h / 3.0;
}

inline double normal_pdf(double y, double variance) {
  return std::exp(-y * y / (2.0 * variance)) / std::sqrt(2.0 * std::numbers::pi * variance);
}

/// mmse for the sparse prior (1 - a) delta_0 + a N(0, 1) through N(0, s2):
/// a - int f_Y(y) E[X | y]^2 dy, by Simpson on +-40 sqrt(1 + s2).
inline double sparse_mmse(double a, double s2) {
  const double half = 40.0 * std::sqrt(1.0 + s2);
  auto integrand = [&](double y) {
    const double p0 = (1.0 - a) * normal_pdf(y, s2);
    const double p1 = a * normal_pdf(y, 1.0 + s2);
    const double fy = p0 + p1;
    if (fy <= 0.0) return 0.0;
    const double m = (p1 / fy) * y / (1.0 + s2);
    return fy * m * m;
  };
  return a - simpson(integrand, -half, half, 400'000);
}

/// mmse for equiprobable +-1 through N(0, s2): 1 - E[tanh(Y / s2)^2], Simpson.
inline double bpsk_mmse(double s2) {
  const double half = 1.0 + 40.0 * std::sqrt(s2);
  auto integrand = [&](double y) {
    const double fy = 0.5 * (normal_pdf(y - 1.0, s2) + normal_pdf(y + 1.0, s2));
    const double m = std::tanh(y / s2);
    return fy * m * m;
  };
  return 1.0 - simpson(integrand, -half, half, 400'000);
}

}  // namespace oracle
