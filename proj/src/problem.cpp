#include "teamdec/problem.hpp"

#include "teamdec/errors.hpp"
#include "teamdec/linalg.hpp"

namespace teamdec {

namespace {
constexpr double kSymmetryTol = 1e-12;
constexpr double kEigenClampTol = 1e-10;

void check_policy_conforms(const ProblemInstance& p, const Policy& k) {
  if (!(k.structure() == p.structure)) {
    fail(ErrorCode::DimensionMismatch, "policy structure does not match instance");
  }
}
}  // namespace

Eigen::MatrixXd ProblemInstance::measurement_block(Eigen::Index i) const {
  return C.middleRows(structure.measurement_offset(i), structure.measurement_dim(i));
}

void validate_instance(ProblemInstance& p) {
  const Eigen::Index l = p.H.rows();
  const Eigen::Index n = p.H.cols();
  const Eigen::Index m = p.structure.total_outputs();
  const Eigen::Index pp = p.structure.total_measurements();

  if (p.D.rows() != l || p.D.cols() != m) {
    fail(ErrorCode::DimensionMismatch, "D must be l x m with l matching H");
  }
  if (p.C.rows() != pp || p.C.cols() != n) {
    fail(ErrorCode::DimensionMismatch, "C must be p x n with n matching H");
  }
  if (p.Vxx.rows() != n || p.Vxx.cols() != n) {
    fail(ErrorCode::DimensionMismatch, "Vxx must be n x n");
  }
  if (p.Vvv.rows() != pp || p.Vvv.cols() != pp) {
    fail(ErrorCode::DimensionMismatch, "Vvv must be p x p");
  }
  if (!is_symmetric(p.Vxx, kSymmetryTol) || !is_symmetric(p.Vvv, kSymmetryTol)) {
    fail(ErrorCode::NotPSD, "covariances must be symmetric within 1e-12");
  }

  const Eigen::MatrixXd dtd = p.D.transpose() * p.D;
  const double dtd_min = min_eigenvalue_sym(dtd);
  if (!(dtd_min > kEigenClampTol * std::max(1.0, max_eigenvalue_sym(dtd)))) {
    fail(ErrorCode::NotPositiveDefinite, "D^T D must be positive definite");
  }

  // Throws NotPSD when an eigenvalue is below the clamp tolerance.
  p.sqrt_Vxx_ = symmetric_sqrt_clamped(p.Vxx, kEigenClampTol);
  p.sqrt_Vvv_ = symmetric_sqrt_clamped(p.Vvv, kEigenClampTol);

  const Eigen::MatrixXd cvc = p.C * p.Vxx * p.C.transpose();
  const double excitation = std::max(0.0, min_eigenvalue_sym(0.5 * (cvc + cvc.transpose()))) +
                            std::max(0.0, min_eigenvalue_sym(p.Vvv));
  p.assumption2_ = dtd_min * excitation > 0.0;
  p.validated_ = true;
}

EnvironmentSample sample_environment(const ProblemInstance& p, std::mt19937_64& rng) {
  if (!p.validated()) fail(ErrorCode::InvalidConfig, "instance has not been validated");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd gx(p.state_dim());
  for (Eigen::Index i = 0; i < gx.size(); ++i) gx(i) = gauss(rng);
  Eigen::VectorXd gv(p.measurement_dim());
  for (Eigen::Index i = 0; i < gv.size(); ++i) gv(i) = gauss(rng);

  EnvironmentSample s;
  s.x = p.sqrt_Vxx() * gx;
  s.v = p.sqrt_Vvv() * gv;
  s.y = p.C * s.x + s.v;
  return s;
}

Eigen::VectorXd realized_output(const ProblemInstance& p, const Policy& k,
                                const EnvironmentSample& s) {
  check_policy_conforms(p, k);
  return p.H * s.x + p.D * k.apply(s.y);
}

double realized_loss(const ProblemInstance& p, const Policy& k, const EnvironmentSample& s) {
  return realized_output(p, k, s).squaredNorm();
}

double expected_loss(const ProblemInstance& p, const Policy& k) {
  check_policy_conforms(p, k);
  const Eigen::MatrixXd kfull = k.as_full_matrix();
  const Eigen::MatrixXd closed = p.H + p.D * kfull * p.C;
  const Eigen::MatrixXd dk = p.D * kfull;
  return (closed * p.Vxx * closed.transpose()).trace() + (dk * p.Vvv * dk.transpose()).trace();
}

Policy expected_gradient(const ProblemInstance& p, const Policy& k) {
  check_policy_conforms(p, k);
  const Eigen::MatrixXd kfull = k.as_full_matrix();
  const Eigen::MatrixXd syy = p.C * p.Vxx * p.C.transpose() + p.Vvv;
  // E[2 D^T z y^T] with E[x y^T] = Vxx C^T and E[y y^T] = Syy.
  const Eigen::MatrixXd full =
      2.0 * p.D.transpose() * (p.H * p.Vxx * p.C.transpose() + p.D * kfull * syy);
  return Policy::block_diagonal_of(p.structure, full);
}

Policy partial_gradient_observation(const ProblemInstance& p, const Eigen::VectorXd& z,
                                    const Eigen::VectorXd& y) {
  if (z.size() != p.output_dim() || y.size() != p.measurement_dim()) {
    fail(ErrorCode::DimensionMismatch, "z or y has wrong length");
  }
  Policy g = Policy::zero(p.structure);
  for (Eigen::Index i = 0; i < p.structure.player_count(); ++i) {
    const auto di = p.D.middleCols(p.structure.output_offset(i), p.structure.output_dim(i));
    const auto yi = y.segment(p.structure.measurement_offset(i), p.structure.measurement_dim(i));
    g.block(i).noalias() = 2.0 * di.transpose() * z * yi.transpose();
  }
  return g;
}

double strong_convexity_alpha(const ProblemInstance& p) {
  const Eigen::MatrixXd dtd = p.D.transpose() * p.D;
  const Eigen::MatrixXd cvc = p.C * p.Vxx * p.C.transpose();
  const double s1 = std::max(0.0, min_eigenvalue_sym(0.5 * (cvc + cvc.transpose())));
  const double s2 = std::max(0.0, min_eigenvalue_sym(p.Vvv));
  return 2.0 * min_eigenvalue_sym(dtd) * (s1 + s2);
}

double gaussian_fourth_moment(const Eigen::MatrixXd& v) {
  if (v.rows() != v.cols() || !is_symmetric(v, kSymmetryTol)) {
    fail(ErrorCode::NotPSD, "covariance must be square symmetric");
  }
  if (v.size() > 0 && min_eigenvalue_sym(v) < -kEigenClampTol) {
    fail(ErrorCode::NotPSD, "covariance has a negative eigenvalue");
  }
  const double tr = v.trace();
  return tr * tr + 2.0 * (v * v).trace();
}

MomentBounds moment_bounds(const ProblemInstance& p, double b_K, std::optional<double> epsilon) {
  if (!(b_K >= 0.0)) fail(ErrorCode::NonPositiveBudget, "policy budget must be nonnegative");
  MomentBounds mb;
  mb.b_K = b_K;
  mb.kappa_x = gaussian_fourth_moment(p.Vxx);
  mb.kappa_v = gaussian_fourth_moment(p.Vvv);
  mb.alpha = strong_convexity_alpha(p);

  const double h = operator_norm(p.H);
  const double d = operator_norm(p.D);
  const double c = operator_norm(p.C);
  const double tr_xx = p.Vxx.trace();
  const double tr_vv = p.Vvv.trace();

  mb.b_l = (h + d * c * b_K) * (h + d * c * b_K) * tr_xx + d * d * b_K * b_K * tr_vv;

  const double z_norm = h + d * c * b_K + d * b_K;
  mb.kappa_z = std::pow(z_norm, 4) * (mb.kappa_x + tr_xx * tr_vv + mb.kappa_v);

  const double fourth = mb.kappa_x + 2.0 * tr_xx * tr_vv + mb.kappa_v;
  const double g_norm = h + b_K * d * (c + 1.0);
  mb.b_G_sq = 4.0 * d * d * g_norm * g_norm * (c + 1.0) * (c + 1.0) * fourth;

  if (epsilon) {
    if (!(*epsilon > 0.0)) fail(ErrorCode::NonPositiveBudget, "epsilon must be positive");
    const double gt_norm = h + d * (b_K + *epsilon) * (c + 1.0);
    mb.bandit_b_G_sq = std::pow(gt_norm, 4) * fourth * p.structure.sum_squared_block_sizes() /
                       (*epsilon * *epsilon);
  }
  return mb;
}

}  // namespace teamdec
