#include "mmseb/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mmseb/errors.hpp"

namespace mmseb {
namespace {

Vector singular_values(const Matrix& a) {
  if (a.size() == 0) return Vector();
  return Eigen::JacobiSVD<Matrix>(a).singularValues();
}

bool rank_ok(double sigma_min, double sigma_max) {
  return sigma_max > 0.0 && sigma_min > kRankRelTol * sigma_max;
}

}  // namespace

double smallest_singular_value(const Matrix& a) {
  const Vector s = singular_values(a);
  return s.size() == 0 ? 0.0 : s.minCoeff();
}

double largest_singular_value(const Matrix& a) {
  const Vector s = singular_values(a);
  return s.size() == 0 ? 0.0 : s.maxCoeff();
}

bool has_full_column_rank(const Matrix& a) {
  if (a.cols() == 0 || a.cols() > a.rows()) return false;
  const Vector s = singular_values(a);
  return rank_ok(s.minCoeff(), s.maxCoeff());
}

Matrix left_pseudo_inverse(const Matrix& a) {
  if (a.cols() == 0 || a.cols() > a.rows())
    throw RankDeficient("left inverse needs 0 < cols <= rows, got " + std::to_string(a.rows()) +
                        "x" + std::to_string(a.cols()));
  if (a.cols() == 1) {
    // Column vector: a^T / ||a||^2.
    const double norm2 = a.col(0).squaredNorm();
    if (!(norm2 > 0.0)) throw RankDeficient("zero column");
    return a.transpose() / norm2;
  }
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  if (!rank_ok(s.minCoeff(), s.maxCoeff()))
    throw RankDeficient("sigma_min " + std::to_string(s.minCoeff()) + " below tolerance");
  return svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
}

double smallest_eigenvalue(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw NotSymmetric("matrix is not square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale)
    throw NotSymmetric("asymmetry exceeds tolerance");
  if (a.rows() == 1) return a(0, 0);
  return Eigen::SelfAdjointEigenSolver<Matrix>(a, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

void require_psd(const Matrix& a, double tol) {
  const double lo = smallest_eigenvalue(a);
  const double hi = a.rows() == 1
                        ? a(0, 0)
                        : Eigen::SelfAdjointEigenSolver<Matrix>(a, Eigen::EigenvaluesOnly)
                              .eigenvalues()
                              .maxCoeff();
  if (lo < -tol * std::max(1.0, std::abs(hi)))
    throw NotPSD("smallest eigenvalue " + std::to_string(lo));
}

}  // namespace mmseb
