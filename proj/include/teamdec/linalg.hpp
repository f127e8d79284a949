#pragma once

#include <Eigen/Dense>

namespace teamdec {

/// Largest singular value of a (possibly rectangular) matrix.
double operator_norm(const Eigen::MatrixXd& a);

/// Smallest singular value strictly above a relative tolerance.
/// Throws ZeroMatrix when every singular value is below it.
double smallest_nonzero_singular_value(const Eigen::MatrixXd& a);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue_sym(const Eigen::MatrixXd& a);

/// Largest eigenvalue of a symmetric matrix.
double max_eigenvalue_sym(const Eigen::MatrixXd& a);

/// Symmetric PSD square root with eigenvalue clamping: eigenvalues in
/// [-clamp_tol, 0) are treated as 0 so singular covariances stay usable.
/// Throws NotPSD when an eigenvalue is below -clamp_tol.
Eigen::MatrixXd symmetric_sqrt_clamped(const Eigen::MatrixXd& v, double clamp_tol = 1e-10);

/// Checks symmetry of a square matrix within an absolute tolerance.
bool is_symmetric(const Eigen::MatrixXd& a, double tol = 1e-12);

}  // namespace teamdec
