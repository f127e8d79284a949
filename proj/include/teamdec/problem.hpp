#pragma once

#include <Eigen/Dense>
#include <optional>
#include <random>

#include "teamdec/block_structure.hpp"
#include "teamdec/policy.hpp"

namespace teamdec {

/// Stochastic team environment: z = Hx + Du, y_i = C_i x + v_i, u_i = K_i y_i,
/// with x ~ N(0, Vxx) and v ~ N(0, Vvv) independent.
struct ProblemInstance {
  Eigen::MatrixXd H;    // l x n
  Eigen::MatrixXd D;    // l x m
  Eigen::MatrixXd C;    // p x n, stacked player blocks C_i
  Eigen::MatrixXd Vxx;  // n x n symmetric PSD
  Eigen::MatrixXd Vvv;  // p x p symmetric PSD
  BlockStructure structure;

  Eigen::Index state_dim() const { return H.cols(); }        // n
  Eigen::Index output_dim() const { return H.rows(); }       // l
  Eigen::Index decision_dim() const { return D.cols(); }     // m
  Eigen::Index measurement_dim() const { return C.rows(); }  // p

  /// C_i, the measurement map of player i.
  Eigen::MatrixXd measurement_block(Eigen::Index i) const;

  bool validated() const { return validated_; }
  /// Whether sigma_min(D^T D)(sigma_min(C Vxx C^T) + sigma_min(Vvv)) > 0.
  bool assumption2_holds() const { return assumption2_; }

  const Eigen::MatrixXd& sqrt_Vxx() const { return sqrt_Vxx_; }
  const Eigen::MatrixXd& sqrt_Vvv() const { return sqrt_Vvv_; }

  friend void validate_instance(ProblemInstance& p);

 private:
  bool validated_ = false;
  bool assumption2_ = false;
  Eigen::MatrixXd sqrt_Vxx_;
  Eigen::MatrixXd sqrt_Vvv_;
};

struct EnvironmentSample {
  Eigen::VectorXd x;  // state of nature
  Eigen::VectorXd v;  // measurement noise
  Eigen::VectorXd y;  // y = Cx + v by construction
};

struct MomentBounds {
  double kappa_x = 0;  // fourth moment bound of x, exact for Gaussians
  double kappa_v = 0;
  double b_l = 0;      // expected-loss bound over the policy ball
  double kappa_z = 0;  // fourth-moment bound of z
  double alpha = 0;    // strong-convexity coefficient
  double b_G_sq = 0;   // second-moment bound of the partial-gradient estimator
  double b_K = 0;
  std::optional<double> bandit_b_G_sq;  // set when an exploration epsilon is supplied
};

/// Checks all structural invariants, clamps covariance eigenvalues in
/// [-1e-10, 0) to zero via the cached symmetric square roots, and records the
/// curvature flag. Throws on hard violations; the curvature flag is reported
/// separately because relaxed instances legitimately fail it.
void validate_instance(ProblemInstance& p);

/// Draws x ~ N(0, Vxx), v ~ N(0, Vvv) through the cached symmetric square
/// roots and forms y = Cx + v. Requires a validated instance.
EnvironmentSample sample_environment(const ProblemInstance& p, std::mt19937_64& rng);

/// z = Hx + D K y for the given sample.
Eigen::VectorXd realized_output(const ProblemInstance& p, const Policy& k,
                                const EnvironmentSample& s);

/// ||Hx + D K y||^2 at the sample.
double realized_loss(const ProblemInstance& p, const Policy& k, const EnvironmentSample& s);

/// Tr[(H + DKC) Vxx (H + DKC)^T] + Tr[(DK) Vvv (DK)^T].
double expected_loss(const ProblemInstance& p, const Policy& k);

/// Block-diagonal part of 2 D^T (H + DKC) Vxx C^T + 2 D^T D K (C Vxx C^T + Vvv);
/// block i is the derivative of the expected loss with respect to K_i.
Policy expected_gradient(const ProblemInstance& p, const Policy& k);

/// Per-step first-order observation of player i: G_i = 2 [D^T]_i z y_i^T.
/// Consistent for the expected-loss gradient.
Policy partial_gradient_observation(const ProblemInstance& p, const Eigen::VectorXd& z,
                                    const Eigen::VectorXd& y);

/// 2 sigma_min(D^T D) (sigma_min(C Vxx C^T) + sigma_min(Vvv)), with sigma_min
/// the smallest eigenvalue of the symmetric PSD argument.
double strong_convexity_alpha(const ProblemInstance& p);

/// (Tr V)^2 + 2 Tr(V^2): the exact value of E[(x^T x)^2] for x ~ N(0, V).
double gaussian_fourth_moment(const Eigen::MatrixXd& v);

/// Closed-form constants for the policy ball of radius b_K. The bandit
/// estimator bound is filled in when epsilon is supplied. Note the two
/// fourth-moment factors differ: kappa_z carries (kappa_x + Tr Vxx Tr Vvv +
/// kappa_v) while the gradient bounds carry (kappa_x + 2 Tr Vxx Tr Vvv +
/// kappa_v); both are implemented as stated.
MomentBounds moment_bounds(const ProblemInstance& p, double b_K,
                           std::optional<double> epsilon = std::nullopt);

}  // namespace teamdec
