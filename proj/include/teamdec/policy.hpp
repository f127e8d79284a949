#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "teamdec/block_structure.hpp"

namespace teamdec {

enum class ProjectionMode {
  sv_clip,        // clip singular values at the budget (exact Frobenius projection)
  radial,         // rescale violating blocks onto the sphere
  paper_literal,  // divide violating blocks by the budget (no feasibility guarantee)
};

/// Block-diagonal team gain Diag(K_1, ..., K_N). Also used as the container
/// for block gradients, which share the shape.
class Policy {
 public:
  Policy() = default;
  Policy(BlockStructure structure, std::vector<Eigen::MatrixXd> blocks);

  static Policy zero(const BlockStructure& structure);

  const BlockStructure& structure() const { return structure_; }
  Eigen::Index block_count() const { return structure_.player_count(); }
  const Eigen::MatrixXd& block(Eigen::Index i) const { return blocks_[i]; }
  Eigen::MatrixXd& block(Eigen::Index i) { return blocks_[i]; }
  const std::vector<Eigen::MatrixXd>& blocks() const { return blocks_; }

  /// Assembles the full m x p matrix; off-block entries are exactly zero.
  Eigen::MatrixXd as_full_matrix() const;

  /// Block-diagonal operator norm: max_i ||K_i||_2.
  double operator_norm() const;

  double frobenius_norm() const;

  /// u = Diag(K_1,...,K_N) y without forming the full matrix.
  Eigen::VectorXd apply(const Eigen::VectorXd& y) const;

  /// Row-major within blocks, blocks in order; matches the normal-equation
  /// coordinate convention.
  Eigen::VectorXd to_parameters() const;
  static Policy from_parameters(const BlockStructure& structure, const Eigen::VectorXd& theta);

  /// Extracts the diagonal blocks of a full m x p matrix.
  static Policy block_diagonal_of(const BlockStructure& structure, const Eigen::MatrixXd& full);

  Policy& add_scaled(const Policy& other, double scale);  // *this += scale * other

 private:
  BlockStructure structure_;
  std::vector<Eigen::MatrixXd> blocks_;
};

/// Entrywise sign perturbation used by the bandit learner: blocks R_i with
/// entries in {-1, +1} and per-block scale epsilon / sqrt(m_i p_i).
struct PerturbationDraw {
  std::vector<Eigen::MatrixXd> R_blocks;
  double epsilon = 0.0;

  double scale(const BlockStructure& s, Eigen::Index i) const {
    return epsilon / std::sqrt(static_cast<double>(s.output_dim(i)) *
                               static_cast<double>(s.measurement_dim(i)));
  }
};

/// Projects each block onto {||K_i||_2 <= b_K} according to the mode.
/// Feasible input is returned unchanged in every mode.
Policy project_policy(const Policy& k, double b_K, ProjectionMode mode = ProjectionMode::sv_clip);

/// Per-block budgets; a zero budget pins the block at zero.
Policy project_policy(const Policy& k, const std::vector<double>& budgets,
                      ProjectionMode mode = ProjectionMode::sv_clip);

/// Samples sign blocks entrywise i.i.d. uniform on {-1,+1}, one draw per
/// entry in row-major block order.
PerturbationDraw rademacher_draw(const BlockStructure& structure, double epsilon,
                                 std::mt19937_64& rng);

/// K_i + R_i * epsilon / sqrt(m_i p_i); the result has operator norm at most
/// ||K||_2 + epsilon.
Policy perturb(const Policy& k, const PerturbationDraw& d);

/// Zeroth-order gradient estimate: block i is loss * R_i * sqrt(m_i p_i) / epsilon.
Policy bandit_gradient_estimate(double loss, const BlockStructure& structure,
                                const PerturbationDraw& d);

}  // namespace teamdec
