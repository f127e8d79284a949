#include "teamdec/policy.hpp"

#include "teamdec/errors.hpp"
#include "teamdec/linalg.hpp"

namespace teamdec {

Policy::Policy(BlockStructure structure, std::vector<Eigen::MatrixXd> blocks)
    : structure_(std::move(structure)), blocks_(std::move(blocks)) {
  if (static_cast<Eigen::Index>(blocks_.size()) != structure_.player_count()) {
    fail(ErrorCode::DimensionMismatch, "need one block per player");
  }
  for (Eigen::Index i = 0; i < structure_.player_count(); ++i) {
    if (blocks_[i].rows() != structure_.output_dim(i) ||
        blocks_[i].cols() != structure_.measurement_dim(i)) {
      fail(ErrorCode::DimensionMismatch, "block " + std::to_string(i) + " has wrong shape");
    }
  }
}

Policy Policy::zero(const BlockStructure& structure) {
  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(structure.player_count());
  for (Eigen::Index i = 0; i < structure.player_count(); ++i) {
    blocks.push_back(Eigen::MatrixXd::Zero(structure.output_dim(i), structure.measurement_dim(i)));
  }
  return Policy(structure, std::move(blocks));
}

Eigen::MatrixXd Policy::as_full_matrix() const {
  Eigen::MatrixXd full =
      Eigen::MatrixXd::Zero(structure_.total_outputs(), structure_.total_measurements());
  for (Eigen::Index i = 0; i < block_count(); ++i) {
    full.block(structure_.output_offset(i), structure_.measurement_offset(i),
               structure_.output_dim(i), structure_.measurement_dim(i)) = blocks_[i];
  }
  return full;
}

double Policy::operator_norm() const {
  double norm = 0.0;
  for (const auto& b : blocks_) norm = std::max(norm, teamdec::operator_norm(b));
  return norm;
}

double Policy::frobenius_norm() const {
  double sq = 0.0;
  for (const auto& b : blocks_) sq += b.squaredNorm();
  return std::sqrt(sq);
}

Eigen::VectorXd Policy::apply(const Eigen::VectorXd& y) const {
  if (y.size() != structure_.total_measurements()) {
    fail(ErrorCode::DimensionMismatch, "measurement vector has wrong length");
  }
  Eigen::VectorXd u(structure_.total_outputs());
  for (Eigen::Index i = 0; i < block_count(); ++i) {
    u.segment(structure_.output_offset(i), structure_.output_dim(i)).noalias() =
        blocks_[i] * y.segment(structure_.measurement_offset(i), structure_.measurement_dim(i));
  }
  return u;
}

Eigen::VectorXd Policy::to_parameters() const {
  Eigen::VectorXd theta(structure_.parameter_count());
  for (Eigen::Index i = 0; i < block_count(); ++i) {
    Eigen::Index off = structure_.parameter_offset(i);
    const Eigen::MatrixXd& b = blocks_[i];
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      for (Eigen::Index c = 0; c < b.cols(); ++c) theta(off + r * b.cols() + c) = b(r, c);
    }
  }
  return theta;
}

Policy Policy::from_parameters(const BlockStructure& structure, const Eigen::VectorXd& theta) {
  if (theta.size() != structure.parameter_count()) {
    fail(ErrorCode::DimensionMismatch, "parameter vector has wrong length");
  }
  Policy k = Policy::zero(structure);
  for (Eigen::Index i = 0; i < structure.player_count(); ++i) {
    Eigen::Index off = structure.parameter_offset(i);
    Eigen::MatrixXd& b = k.block(i);
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      for (Eigen::Index c = 0; c < b.cols(); ++c) b(r, c) = theta(off + r * b.cols() + c);
    }
  }
  return k;
}

Policy Policy::block_diagonal_of(const BlockStructure& structure, const Eigen::MatrixXd& full) {
  if (full.rows() != structure.total_outputs() || full.cols() != structure.total_measurements()) {
    fail(ErrorCode::DimensionMismatch, "full matrix has wrong shape");
  }
  Policy k = Policy::zero(structure);
  for (Eigen::Index i = 0; i < structure.player_count(); ++i) {
    k.block(i) = full.block(structure.output_offset(i), structure.measurement_offset(i),
                            structure.output_dim(i), structure.measurement_dim(i));
  }
  return k;
}

Policy& Policy::add_scaled(const Policy& other, double scale) {
  if (!(structure_ == other.structure_)) {
    fail(ErrorCode::DimensionMismatch, "policy structures differ");
  }
  for (Eigen::Index i = 0; i < block_count(); ++i) blocks_[i] += scale * other.blocks_[i];
  return *this;
}

namespace {

Eigen::MatrixXd clip_singular_values(const Eigen::MatrixXd& block, double b_K) {
  // 1x1 fast path; the general case goes through a full SVD.
  if (block.rows() == 1 && block.cols() == 1) {
    double v = block(0, 0);
    return Eigen::MatrixXd::Constant(1, 1, std::clamp(v, -b_K, b_K));
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(block, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd sv = svd.singularValues();
  for (Eigen::Index j = 0; j < sv.size(); ++j) sv(j) = std::min(sv(j), b_K);
  return svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();
}

}  // namespace

namespace {

void project_block(Eigen::MatrixXd& block, double b_K, ProjectionMode mode) {
  if (b_K == 0.0) {
    block.setZero();
    return;
  }
  double norm = operator_norm(block);
  if (norm <= b_K) return;  // feasible blocks pass through untouched
  switch (mode) {
    case ProjectionMode::sv_clip:
      block = clip_singular_values(block, b_K);
      break;
    case ProjectionMode::radial:
      block *= b_K / norm;
      break;
    case ProjectionMode::paper_literal:
      block /= b_K;
      break;
  }
}

}  // namespace

Policy project_policy(const Policy& k, double b_K, ProjectionMode mode) {
  if (!(b_K > 0.0)) fail(ErrorCode::NonPositiveBudget, "projection budget must be positive");
  Policy out = k;
  for (Eigen::Index i = 0; i < k.block_count(); ++i) project_block(out.block(i), b_K, mode);
  return out;
}

Policy project_policy(const Policy& k, const std::vector<double>& budgets, ProjectionMode mode) {
  if (static_cast<Eigen::Index>(budgets.size()) != k.block_count()) {
    fail(ErrorCode::DimensionMismatch, "need one budget per block");
  }
  Policy out = k;
  for (Eigen::Index i = 0; i < k.block_count(); ++i) {
    if (budgets[i] < 0.0) fail(ErrorCode::NonPositiveBudget, "budgets must be nonnegative");
    project_block(out.block(i), budgets[i], mode);
  }
  return out;
}

PerturbationDraw rademacher_draw(const BlockStructure& structure, double epsilon,
                                 std::mt19937_64& rng) {
  if (!(epsilon > 0.0)) fail(ErrorCode::NonPositiveBudget, "exploration epsilon must be positive");
  PerturbationDraw d;
  d.epsilon = epsilon;
  d.R_blocks.reserve(structure.player_count());
  for (Eigen::Index i = 0; i < structure.player_count(); ++i) {
    Eigen::MatrixXd r(structure.output_dim(i), structure.measurement_dim(i));
    for (Eigen::Index a = 0; a < r.rows(); ++a) {
      for (Eigen::Index b = 0; b < r.cols(); ++b) {
        r(a, b) = (rng() & 1ull) ? 1.0 : -1.0;
      }
    }
    d.R_blocks.push_back(std::move(r));
  }
  return d;
}

Policy perturb(const Policy& k, const PerturbationDraw& d) {
  if (static_cast<Eigen::Index>(d.R_blocks.size()) != k.block_count()) {
    fail(ErrorCode::DimensionMismatch, "perturbation block count differs from policy");
  }
  Policy out = k;
  for (Eigen::Index i = 0; i < k.block_count(); ++i) {
    if (d.R_blocks[i].rows() != k.block(i).rows() || d.R_blocks[i].cols() != k.block(i).cols()) {
      fail(ErrorCode::DimensionMismatch, "perturbation block " + std::to_string(i) + " mismatched");
    }
    out.block(i) += d.R_blocks[i] * d.scale(k.structure(), i);
  }
  return out;
}

Policy bandit_gradient_estimate(double loss, const BlockStructure& structure,
                                const PerturbationDraw& d) {
  if (!(d.epsilon > 0.0)) fail(ErrorCode::NonPositiveBudget, "exploration epsilon must be positive");
  Policy g = Policy::zero(structure);
  for (Eigen::Index i = 0; i < structure.player_count(); ++i) {
    // loss * R_i / scale_i = loss * R_i * sqrt(m_i p_i) / epsilon
    g.block(i) = d.R_blocks[i] * (loss / d.scale(structure, i));
  }
  return g;
}

}  // namespace teamdec
