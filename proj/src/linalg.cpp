#include "teamdec/linalg.hpp"

#include "teamdec/errors.hpp"

namespace teamdec {

double operator_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues()(0);
}

double smallest_nonzero_singular_value(const Eigen::MatrixXd& a) {
  if (a.size() == 0) fail(ErrorCode::ZeroMatrix, "empty matrix has no nonzero singular value");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  double tol = 1e-12 * std::max(1.0, sv(0));
  for (Eigen::Index i = sv.size() - 1; i >= 0; --i) {
    if (sv(i) > tol) return sv(i);
  }
  fail(ErrorCode::ZeroMatrix, "matrix has no singular value above tolerance");
}

double min_eigenvalue_sym(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_eigenvalue_sym(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

Eigen::MatrixXd symmetric_sqrt_clamped(const Eigen::MatrixXd& v, double clamp_tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v);
  Eigen::VectorXd lam = es.eigenvalues();
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) < -clamp_tol) {
      fail(ErrorCode::NotPSD, "eigenvalue " + std::to_string(lam(i)) + " below -" +
                                  std::to_string(clamp_tol));
    }
    lam(i) = lam(i) > 0.0 ? std::sqrt(lam(i)) : 0.0;
  }
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

bool is_symmetric(const Eigen::MatrixXd& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace teamdec
