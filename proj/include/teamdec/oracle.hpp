#pragma once

#include <Eigen/Dense>
#include <functional>
#include <random>
#include <vector>

#include "teamdec/errors.hpp"
#include "teamdec/numerics.hpp"
#include "teamdec/policy.hpp"
#include "teamdec/problem.hpp"

namespace teamdec {

/// Quadratic model of a team objective over the vectorized block-diagonal
/// coordinates theta (d = sum m_i p_i, row-major within blocks):
///   f(theta) = constant + b^T theta + (1/2) theta^T A theta.
/// A is symmetric PSD; stationarity solves A theta = -b.
struct NormalEquations {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  double constant = 0.0;

  double value(const Eigen::VectorXd& theta) const {
    return constant + b.dot(theta) + 0.5 * theta.dot(A * theta);
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const { return b + A * theta; }
};

/// Quadratic f(K) = constant + <linear, K>_F + Tr[K^T gram K smoment] over the
/// block coordinates; gram is m x m, smoment p x p (both symmetric PSD),
/// linear m x p. Only the diagonal blocks of `linear` enter.
NormalEquations policy_quadratic(const BlockStructure& s, const Eigen::MatrixXd& gram,
                                 const Eigen::MatrixXd& smoment, const Eigen::MatrixXd& linear,
                                 double constant);

/// Projected gradient minimization of a quadratic over blockwise operator-norm
/// balls; stops when the projected-gradient norm is at most tol.
Policy minimize_quadratic_over_ball(const NormalEquations& ne, const BlockStructure& s,
                                    const std::vector<double>& budgets, const Policy& start,
                                    double tol);

/// Normal equations of the expected loss. A is also the exact Hessian of the
/// expected loss over the block coordinates.
NormalEquations expected_normal_equations(const ProblemInstance& p);

/// One-pass accumulator of the empirical objective sum_t ||H x_t + D K y_t||^2.
/// Stores only second moments, so shards can be merged in fixed order.
class EmpiricalNormalEquations {
 public:
  EmpiricalNormalEquations(Eigen::Index state_dim, Eigen::Index measurement_dim);

  void add_sample(const Eigen::VectorXd& x, const Eigen::VectorXd& y);
  void add_sample(const EnvironmentSample& s) { add_sample(s.x, s.y); }
  void merge(const EmpiricalNormalEquations& other);

  long count() const { return count_; }
  NormalEquations assemble(const ProblemInstance& p) const;

 private:
  Eigen::MatrixXd sum_xx_;  // sum x x^T
  Eigen::MatrixXd sum_xy_;  // sum x y^T
  Eigen::MatrixXd sum_yy_;  // sum y y^T
  long count_ = 0;
};

/// Unique stationary point of the expected loss over block-diagonal policies.
/// Requires an invertible system (guaranteed under the curvature assumption);
/// the residual gradient norm of the returned policy is at most 1e-8.
Policy optimal_policy_expected(const ProblemInstance& p);

/// Minimizer of the realized cumulative loss over {||K_i||_2 <= b_K}. Solves
/// the empirical normal equations (ridge 1e-10 when singular) and refines by
/// projected gradient descent when the unconstrained solution is infeasible.
Policy best_in_hindsight(const ProblemInstance& p, const std::vector<EnvironmentSample>& samples,
                         double b_K);
Policy best_in_hindsight(const ProblemInstance& p, const EmpiricalNormalEquations& acc,
                         double b_K);

/// Central differences of a scalar field over policies, one block coordinate
/// at a time. Validation oracle; exact for quadratics up to rounding.
Policy finite_difference_gradient(const std::function<double(const Policy&)>& f, const Policy& k,
                                  double h);

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  long count = 0;
};

/// Streaming Monte Carlo mean with compensated summation.
/// sampler: (rng) -> draw; statistic: (draw) -> double.
template <class Sampler, class Statistic>
MonteCarloEstimate monte_carlo_expectation(Sampler&& sampler, Statistic&& statistic, long n,
                                           std::mt19937_64& rng) {
  if (n < 2) fail(ErrorCode::NonPositiveParam, "need at least two Monte Carlo samples");
  RunningMoments moments;
  for (long i = 0; i < n; ++i) moments.add(statistic(sampler(rng)));
  return MonteCarloEstimate{moments.mean(), moments.standard_error(), n};
}

}  // namespace teamdec
