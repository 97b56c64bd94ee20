#pragma once

#include <Eigen/Dense>

namespace mmseb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative threshold used for every rank decision: a matrix is treated as
/// rank deficient when sigma_min <= kRankRelTol * sigma_max (or sigma_max == 0).
inline constexpr double kRankRelTol = 1e-10;

/// Symmetry tolerance accepted by smallest_eigenvalue().
inline constexpr double kSymmetryTol = 1e-12;

double smallest_singular_value(const Matrix& a);
double largest_singular_value(const Matrix& a);

/// True when `a` (rows >= cols) has full column rank under kRankRelTol.
bool has_full_column_rank(const Matrix& a);

/// (A^T A)^{-1} A^T for a full-column-rank A, evaluated through the SVD.
/// Throws RankDeficient when cols > rows or the rank test fails.
Matrix left_pseudo_inverse(const Matrix& a);

/// Smallest eigenvalue of a symmetric matrix. Throws NotSymmetric.
double smallest_eigenvalue(const Matrix& a);

/// Throws NotSymmetric / NotPSD unless `a` is symmetric positive semidefinite
/// (eigenvalues >= -tol * max(1, |lambda_max|)).
void require_psd(const Matrix& a, double tol = 1e-12);

}  // namespace mmseb
