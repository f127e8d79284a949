#include "teamdec/robust.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "teamdec/errors.hpp"
#include "teamdec/linalg.hpp"
#include "teamdec/oracle.hpp"

namespace teamdec {

Eigen::MatrixXd RobustInstance::measurement_block(Eigen::Index i) const {
  return C.middleRows(structure.measurement_offset(i), structure.measurement_dim(i));
}

void validate_robust_instance(const RobustInstance& r) {
  if (r.D.rows() != r.H.rows() || r.D.cols() != r.structure.total_outputs()) {
    fail(ErrorCode::DimensionMismatch, "D must be l x m with l matching H");
  }
  if (r.C.rows() != r.structure.total_measurements() || r.C.cols() != r.H.cols()) {
    fail(ErrorCode::DimensionMismatch, "C must be p x n with n matching H");
  }
  const Eigen::MatrixXd dtd = r.D.transpose() * r.D;
  if (!(min_eigenvalue_sym(dtd) > 1e-10 * std::max(1.0, max_eigenvalue_sym(dtd)))) {
    fail(ErrorCode::NotPositiveDefinite, "D^T D must be positive definite");
  }
}

double gamma_trivial_upper(const RobustInstance& r) {
  const double h = operator_norm(r.H);
  return h * h;
}

std::vector<double> robust_policy_budget(const RobustInstance& r) {
  const double h = operator_norm(r.H);
  const double d_min = smallest_nonzero_singular_value(r.D);
  std::vector<double> budgets;
  budgets.reserve(r.structure.player_count());
  for (Eigen::Index i = 0; i < r.structure.player_count(); ++i) {
    const double c_min = smallest_nonzero_singular_value(r.measurement_block(i));
    budgets.push_back(2.0 * h / (d_min * c_min));
  }
  return budgets;
}

double lmi_margin(const RobustInstance& r, const Policy& k, double gamma) {
  if (gamma < 0.0) fail(ErrorCode::NonPositiveParam, "gamma must be nonnegative");
  if (!(k.structure() == r.structure)) {
    fail(ErrorCode::DimensionMismatch, "policy structure does not match instance");
  }
  const Eigen::MatrixXd m = r.H + r.D * k.as_full_matrix() * r.C;
  const Eigen::Index n = r.H.cols();
  return min_eigenvalue_sym(gamma * Eigen::MatrixXd::Identity(n, n) - m.transpose() * m);
}

namespace {

// Euclidean projection of a vector onto the probability simplex.
Eigen::VectorXd simplex_project(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0;
  double tau = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    css += u[j];
    const double cand = (css - 1.0) / static_cast<double>(j + 1);
    if (u[j] - cand > 0.0) tau = cand;
  }
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = std::max(v(i) - tau, 0.0);
  return out;
}

struct SaddleWork {
  const RobustInstance& r;
  std::vector<double> budgets;
  Eigen::MatrixXd dtd;

  Eigen::MatrixXd closed(const Policy& k) const { return r.H + r.D * k.as_full_matrix() * r.C; }

  double payoff(const Eigen::MatrixXd& m, const Eigen::MatrixXd& x) const {
    return (m.transpose() * m * x).trace();
  }

  Policy grad_k(const Eigen::MatrixXd& m, const Eigen::MatrixXd& x) const {
    return Policy::block_diagonal_of(r.structure,
                                     2.0 * r.D.transpose() * m * x * r.C.transpose());
  }

  Eigen::MatrixXd grad_x(const Eigen::MatrixXd& m) const { return m.transpose() * m; }

  // Exact minimizer of phi(., x) over the budget balls, via the quadratic
  // normal equations in the block coordinates.
  Policy best_response_k(const Eigen::MatrixXd& x, const Policy& start, double tol) const {
    NormalEquations ne =
        policy_quadratic(r.structure, dtd, r.C * x * r.C.transpose(),
                         2.0 * r.D.transpose() * r.H * x * r.C.transpose(),
                         (r.H * x * r.H.transpose()).trace());
    return minimize_quadratic_over_ball(ne, r.structure, budgets, start, tol);
  }

  SaddleState evaluate(const Policy& k, const Eigen::MatrixXd& x) const {
    SaddleState s;
    s.K = k;
    s.X = x;
    const Eigen::MatrixXd m = closed(k);
    s.gamma = max_eigenvalue_sym(m.transpose() * m);
    s.payoff = payoff(m, x);
    s.gap = s.gamma - s.payoff;
    return s;
  }
};

}  // namespace

Eigen::MatrixXd spectraplex_project(const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols()) fail(ErrorCode::DimensionMismatch, "matrix must be square");
  const Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  const Eigen::VectorXd lam = simplex_project(es.eigenvalues());
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

SaddleState saddle_solve(const RobustInstance& r, double tol, long max_iter) {
  SaddleOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  return saddle_solve(r, opts);
}

SaddleState saddle_solve(const RobustInstance& r, const SaddleOptions& opts) {
  validate_robust_instance(r);
  if (!(opts.tol > 0.0)) fail(ErrorCode::NonPositiveParam, "tolerance must be positive");

  SaddleWork work{r, robust_policy_budget(r), r.D.transpose() * r.D};
  const Eigen::Index n = r.H.cols();

  const double h = operator_norm(r.H);
  const double d = operator_norm(r.D);
  const double c = operator_norm(r.C);
  const double b_max = *std::max_element(work.budgets.begin(), work.budgets.end());
  const double sigma_bar = h + d * b_max * c;
  // Lipschitz bound of the gradient field over the feasible sets (||X||_2 <= 1).
  const double lips = 2.0 * d * d * c * c + 4.0 * d * c * sigma_bar + 1e-12;
  const double step = 1.0 / lips;

  Policy k = Policy::zero(r.structure);
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(n, n) / static_cast<double>(n);

  Eigen::VectorXd k_avg = Eigen::VectorXd::Zero(r.structure.parameter_count());
  Eigen::MatrixXd x_avg = Eigen::MatrixXd::Zero(n, n);
  long avg_count = 0;

  // The inner solve only needs to certify suboptimality well below tol:
  // phi(K-hat, X) - min_K phi <= pg_norm * diameter of the budget set.
  double diam_sq = 0.0;
  for (Eigen::Index i = 0; i < r.structure.player_count(); ++i) {
    diam_sq += static_cast<double>(std::min(r.structure.output_dim(i),
                                            r.structure.measurement_dim(i))) *
               work.budgets[i] * work.budgets[i];
  }
  const double diameter = 2.0 * std::sqrt(diam_sq);
  const double inner_tol = std::max(1e-12, 0.02 * opts.tol / std::max(diameter, 1.0));

  // Only pairs whose K exactly minimizes phi(., X) enter as candidates: for
  // such a pair gamma(K) - phi(K, X) >= gamma(K) - gamma*, so the reported
  // gap is a genuine optimality certificate. The raw iterate gap is not (it
  // vanishes whenever X happens to be nature's best response to K).
  auto certified = [&](const Eigen::MatrixXd& x_cand, const Policy& start, long it) {
    SaddleState s = work.evaluate(work.best_response_k(x_cand, start, inner_tol), x_cand);
    s.iterations = it;
    return s;
  };

  SaddleState best = certified(x, k, 0);
  if (best.gap <= opts.tol) {
    best.converged = true;
    return best;
  }
  double last_window_gap = best.gap;

  for (long it = 1; it <= opts.max_iter; ++it) {
    // Extragradient: lookahead step, then update from the lookahead gradients.
    Eigen::MatrixXd m = work.closed(k);
    Policy k_half = k;
    k_half.add_scaled(work.grad_k(m, x), -step);
    k_half = project_policy(k_half, work.budgets, ProjectionMode::sv_clip);
    Eigen::MatrixXd x_half = spectraplex_project(x + step * work.grad_x(m));

    Eigen::MatrixXd m_half = work.closed(k_half);
    Policy k_next = k;
    k_next.add_scaled(work.grad_k(m_half, x_half), -step);
    k = project_policy(k_next, work.budgets, ProjectionMode::sv_clip);
    x = spectraplex_project(x + step * work.grad_x(m_half));

    k_avg += k_half.to_parameters();
    x_avg += x_half;
    ++avg_count;

    if (it % opts.check_interval == 0 || it == opts.max_iter) {
      const Eigen::MatrixXd x_bar = x_avg / static_cast<double>(avg_count);
      const Policy k_bar =
          Policy::from_parameters(r.structure, k_avg / static_cast<double>(avg_count));

      const SaddleState from_avg = certified(x_bar, k_bar, it);
      if (from_avg.gap < best.gap) best = from_avg;
      const SaddleState from_last = certified(x, k, it);
      if (from_last.gap < best.gap) best = from_last;

      if (best.gap <= opts.tol) {
        best.converged = true;
        return best;
      }
      // Restart the averages when progress stalls; keeps the ergodic pair
      // tracking the current neighborhood instead of early iterates.
      if (best.gap > 0.9 * last_window_gap) {
        k_avg.setZero();
        x_avg.setZero();
        avg_count = 0;
      }
      last_window_gap = best.gap;
    }
  }
  best.iterations = opts.max_iter;
  return best;
}

ProblemInstance relaxed_instance(const RobustInstance& r, const Eigen::MatrixXd& x) {
  validate_robust_instance(r);
  if (x.rows() != r.H.cols() || x.cols() != r.H.cols()) {
    fail(ErrorCode::DimensionMismatch, "X must be n x n");
  }
  ProblemInstance p;
  p.H = r.H;
  p.D = r.D;
  p.C = r.C;
  p.Vxx = 0.5 * (x + x.transpose());
  p.Vvv = Eigen::MatrixXd::Zero(r.structure.total_measurements(), r.structure.total_measurements());
  p.structure = r.structure;
  validate_instance(p);
  return p;
}

double robust_regret_bound(Feedback kind, const RobustInstance& r, double b_K, double horizon,
                           double kappa_x) {
  if (!(b_K >= 0.0) || !(horizon > 0.0) || !(kappa_x >= 0.0)) {
    fail(ErrorCode::NonPositiveParam, "bound inputs must be nonnegative");
  }
  const double h = operator_norm(r.H);
  const double d = operator_norm(r.D);
  const double c = operator_norm(r.C);
  const double m = static_cast<double>(r.structure.total_outputs());
  const double p = static_cast<double>(r.structure.total_measurements());

  if (kind == Feedback::gradient) {
    const double g = h + b_K * d * c;
    const double b_g_sq = 4.0 * d * d * g * g * c * c * kappa_x;
    return 4.0 * std::sqrt(std::max(m, p)) * (b_K * b_K + b_g_sq) * std::sqrt(horizon);
  }
  const double big_m = 1.0 + std::pow(h + d * c * b_K, 4) * kappa_x + d * d * c * c;
  return 1.5 * std::cbrt(4.0 * std::min(m, p) * b_K * b_K) *
         std::cbrt(r.structure.sum_squared_block_sizes()) * big_m * std::pow(horizon, 2.0 / 3.0);
}

}  // namespace teamdec
