#pragma once

#include <Eigen/Dense>
#include <vector>

#include "teamdec/learners.hpp"
#include "teamdec/policy.hpp"
#include "teamdec/problem.hpp"

namespace teamdec {

/// Worst-case team problem: nature picks x adversarially and the value is the
/// ratio ||Hx + Du||^2 / ||x||^2 with noiseless measurements y_i = C_i x.
struct RobustInstance {
  Eigen::MatrixXd H;  // l x n
  Eigen::MatrixXd D;  // l x m
  Eigen::MatrixXd C;  // p x n
  BlockStructure structure;

  Eigen::MatrixXd measurement_block(Eigen::Index i) const;
};

/// Checks dimensions and that D^T D is positive definite.
void validate_robust_instance(const RobustInstance& r);

/// Saddle point of the dual game phi(K, X) = Tr[(H+DKC) X (H+DKC)^T] over
/// blockwise-bounded K and unit-trace PSD X.
struct SaddleState {
  Policy K;
  Eigen::MatrixXd X;
  double gamma = 0.0;   // max eigenvalue of (H+DKC)^T (H+DKC): nature's best response value
  double payoff = 0.0;  // phi(K, X) at the returned pair
  double gap = 0.0;     // gamma - payoff; nonnegative up to roundoff
  bool converged = false;
  long iterations = 0;
};

struct SaddleOptions {
  double tol = 1e-6;
  long max_iter = 2000000;
  long check_interval = 250;
};

/// Value of the zero policy, ||H||_2^2; a certified upper bound on the game value.
double gamma_trivial_upper(const RobustInstance& r);

/// Certified per-block norm budgets 2 ||H||_2 / (sigma_min>0(D) sigma_min>0(C_i)).
std::vector<double> robust_policy_budget(const RobustInstance& r);

/// Smallest eigenvalue of gamma I - (H+DKC)^T (H+DKC); nonnegative exactly
/// when policy K attains value at most gamma.
double lmi_margin(const RobustInstance& r, const Policy& k, double gamma);

/// Exact Frobenius projection onto {X PSD, Tr X = 1}: eigenvalues are
/// projected onto the probability simplex and the matrix is reassembled.
Eigen::MatrixXd spectraplex_project(const Eigen::MatrixXd& s);

/// First-order projected descent-ascent (extragradient steps with ergodic
/// averaging, warm start K = 0, X = I/n). Terminates when the gap certificate
/// drops to tol or at max_iter; a non-converged result still carries the best
/// state found with its gap.
SaddleState saddle_solve(const RobustInstance& r, const SaddleOptions& opts = {});
SaddleState saddle_solve(const RobustInstance& r, double tol, long max_iter);

/// Stochastic relaxation at nature's (mixed) strategy X: Vxx = X, Vvv = 0.
/// Such instances generally violate the curvature assumption, so learners
/// should run convex-rate schedules on them.
ProblemInstance relaxed_instance(const RobustInstance& r, const Eigen::MatrixXd& x);

/// Regret bounds of the convex-rate schedules on the relaxed problem.
/// kappa_x defaults to 3, the exact maximum of (Tr X)^2 + 2 Tr(X^2) over
/// unit-trace PSD X; pass the relaxed instance's value when X is known.
double robust_regret_bound(Feedback kind, const RobustInstance& r, double b_K, double horizon,
                           double kappa_x = 3.0);

}  // namespace teamdec
