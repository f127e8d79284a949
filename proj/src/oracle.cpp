#include "teamdec/oracle.hpp"

#include "teamdec/linalg.hpp"

namespace teamdec {

namespace {

constexpr double kRidge = 1e-10;
constexpr double kResidualTol = 1e-8;

Eigen::VectorXd solve_stationary(const NormalEquations& ne) {
  const Eigen::Index d = ne.A.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ne.A, Eigen::EigenvaluesOnly);
  const double lam_max = es.eigenvalues().maxCoeff();
  const double lam_min = es.eigenvalues().minCoeff();
  const bool singular = !(lam_min > 1e-12 * std::max(1.0, lam_max));
  Eigen::MatrixXd a = ne.A;
  if (singular) a += kRidge * Eigen::MatrixXd::Identity(d, d);
  return a.ldlt().solve(-ne.b);
}

}  // namespace

NormalEquations policy_quadratic(const BlockStructure& s, const Eigen::MatrixXd& gram,
                                 const Eigen::MatrixXd& smoment, const Eigen::MatrixXd& linear,
                                 double constant) {
  if (gram.rows() != s.total_outputs() || gram.cols() != s.total_outputs() ||
      smoment.rows() != s.total_measurements() || smoment.cols() != s.total_measurements() ||
      linear.rows() != s.total_outputs() || linear.cols() != s.total_measurements()) {
    fail(ErrorCode::DimensionMismatch, "quadratic coefficient shapes do not match structure");
  }
  // A[(i,a,b),(j,c,d)] = 2 gram[ma+a, mc+c] smoment[pb+b, pd+d], so that
  // (1/2) theta^T A theta = Tr[K^T gram K smoment].
  const Eigen::Index d = s.parameter_count();
  NormalEquations ne;
  ne.A.resize(d, d);
  for (Eigen::Index i = 0; i < s.player_count(); ++i) {
    for (Eigen::Index r = 0; r < s.output_dim(i); ++r) {
      for (Eigen::Index c = 0; c < s.measurement_dim(i); ++c) {
        const Eigen::Index row = s.parameter_offset(i) + r * s.measurement_dim(i) + c;
        for (Eigen::Index j = 0; j < s.player_count(); ++j) {
          for (Eigen::Index r2 = 0; r2 < s.output_dim(j); ++r2) {
            for (Eigen::Index c2 = 0; c2 < s.measurement_dim(j); ++c2) {
              const Eigen::Index col = s.parameter_offset(j) + r2 * s.measurement_dim(j) + c2;
              ne.A(row, col) = 2.0 * gram(s.output_offset(i) + r, s.output_offset(j) + r2) *
                               smoment(s.measurement_offset(i) + c, s.measurement_offset(j) + c2);
            }
          }
        }
      }
    }
  }
  ne.A = 0.5 * (ne.A + ne.A.transpose()).eval();  // enforce exact symmetry
  ne.b = Policy::block_diagonal_of(s, linear).to_parameters();
  ne.constant = constant;
  return ne;
}

NormalEquations expected_normal_equations(const ProblemInstance& p) {
  const Eigen::MatrixXd syy = p.C * p.Vxx * p.C.transpose() + p.Vvv;
  return policy_quadratic(p.structure, p.D.transpose() * p.D, 0.5 * (syy + syy.transpose()),
                          2.0 * p.D.transpose() * p.H * p.Vxx * p.C.transpose(),
                          (p.H * p.Vxx * p.H.transpose()).trace());
}

EmpiricalNormalEquations::EmpiricalNormalEquations(Eigen::Index state_dim,
                                                   Eigen::Index measurement_dim)
    : sum_xx_(Eigen::MatrixXd::Zero(state_dim, state_dim)),
      sum_xy_(Eigen::MatrixXd::Zero(state_dim, measurement_dim)),
      sum_yy_(Eigen::MatrixXd::Zero(measurement_dim, measurement_dim)) {}

void EmpiricalNormalEquations::add_sample(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != sum_xx_.rows() || y.size() != sum_yy_.rows()) {
    fail(ErrorCode::DimensionMismatch, "sample dimensions do not match accumulator");
  }
  sum_xx_.noalias() += x * x.transpose();
  sum_xy_.noalias() += x * y.transpose();
  sum_yy_.noalias() += y * y.transpose();
  ++count_;
}

void EmpiricalNormalEquations::merge(const EmpiricalNormalEquations& other) {
  if (other.sum_xx_.rows() != sum_xx_.rows() || other.sum_yy_.rows() != sum_yy_.rows()) {
    fail(ErrorCode::DimensionMismatch, "accumulator dimensions differ");
  }
  sum_xx_ += other.sum_xx_;
  sum_xy_ += other.sum_xy_;
  sum_yy_ += other.sum_yy_;
  count_ += other.count_;
}

NormalEquations EmpiricalNormalEquations::assemble(const ProblemInstance& p) const {
  if (count_ == 0) fail(ErrorCode::EmptySample, "no samples accumulated");
  return policy_quadratic(p.structure, p.D.transpose() * p.D,
                          0.5 * (sum_yy_ + sum_yy_.transpose()),
                          2.0 * p.D.transpose() * p.H * sum_xy_,
                          (p.H * sum_xx_ * p.H.transpose()).trace());
}

Policy optimal_policy_expected(const ProblemInstance& p) {
  NormalEquations ne = expected_normal_equations(p);
  const double lam_min = min_eigenvalue_sym(ne.A);
  const double lam_max = max_eigenvalue_sym(ne.A);
  if (!(lam_min > 1e-12 * std::max(1.0, lam_max))) {
    fail(ErrorCode::SingularSystem, "expected-loss curvature is rank deficient");
  }
  const Eigen::VectorXd theta = ne.A.ldlt().solve(-ne.b);
  Policy k = Policy::from_parameters(p.structure, theta);
  if (expected_gradient(p, k).frobenius_norm() > kResidualTol) {
    fail(ErrorCode::SingularSystem, "stationary solve left a large residual gradient");
  }
  return k;
}

Policy minimize_quadratic_over_ball(const NormalEquations& ne, const BlockStructure& s,
                                    const std::vector<double>& budgets, const Policy& start,
                                    double tol) {
  const double lam_max = max_eigenvalue_sym(ne.A);
  const double step = lam_max > 0.0 ? 1.0 / lam_max : 1.0;
  auto project = [&](const Eigen::VectorXd& theta) {
    return project_policy(Policy::from_parameters(s, theta), budgets, ProjectionMode::sv_clip)
        .to_parameters();
  };

  // Accelerated projected gradient with gradient-based adaptive restart;
  // handles rank-deficient quadratics where plain descent crawls.
  Eigen::VectorXd k = project(start.to_parameters());
  Eigen::VectorXd y = k;
  double momentum = 1.0;
  constexpr long kMaxIter = 200000;
  for (long it = 0; it < kMaxIter; ++it) {
    const Eigen::VectorXd k_next = project(y - step * ne.gradient(y));
    if ((y - k_next).dot(k_next - k) > 0.0) {
      momentum = 1.0;
      y = k_next;
    } else {
      const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      y = k_next + ((momentum - 1.0) / next_momentum) * (k_next - k);
      momentum = next_momentum;
    }
    const bool promising = (k - k_next).norm() / step <= tol;
    k = k_next;
    if (promising || (it & 15) == 15) {
      const double pg_norm = (k - project(k - step * ne.gradient(k))).norm() / step;
      if (pg_norm <= tol) break;
    }
  }
  return Policy::from_parameters(s, project(k));
}

Policy best_in_hindsight(const ProblemInstance& p, const EmpiricalNormalEquations& acc,
                         double b_K) {
  if (acc.count() == 0) fail(ErrorCode::EmptySample, "empty sample list");
  if (!(b_K > 0.0)) fail(ErrorCode::NonPositiveBudget, "policy budget must be positive");
  NormalEquations ne = acc.assemble(p);
  Policy k = Policy::from_parameters(p.structure, solve_stationary(ne));
  if (k.operator_norm() <= b_K) return k;
  const std::vector<double> budgets(p.structure.player_count(), b_K);
  return minimize_quadratic_over_ball(ne, p.structure, budgets, k, kResidualTol);
}

Policy best_in_hindsight(const ProblemInstance& p, const std::vector<EnvironmentSample>& samples,
                         double b_K) {
  if (samples.empty()) fail(ErrorCode::EmptySample, "empty sample list");
  EmpiricalNormalEquations acc(p.state_dim(), p.measurement_dim());
  for (const auto& s : samples) acc.add_sample(s);
  return best_in_hindsight(p, acc, b_K);
}

Policy finite_difference_gradient(const std::function<double(const Policy&)>& f, const Policy& k,
                                  double h) {
  if (!(h > 0.0)) fail(ErrorCode::NonPositiveParam, "finite-difference step must be positive");
  Policy g = Policy::zero(k.structure());
  Policy probe = k;
  for (Eigen::Index i = 0; i < k.block_count(); ++i) {
    for (Eigen::Index r = 0; r < k.block(i).rows(); ++r) {
      for (Eigen::Index c = 0; c < k.block(i).cols(); ++c) {
        const double orig = probe.block(i)(r, c);
        probe.block(i)(r, c) = orig + h;
        const double up = f(probe);
        probe.block(i)(r, c) = orig - h;
        const double down = f(probe);
        probe.block(i)(r, c) = orig;
        g.block(i)(r, c) = (up - down) / (2.0 * h);
      }
    }
  }
  return g;
}

}  // namespace teamdec
