#pragma once

#include <Eigen/Core>
#include <vector>

namespace teamdec {

/// Block layout of a team: player i contributes an m_i x p_i gain acting on
/// its own slice of the stacked measurement. Offsets are prefix sums.
class BlockStructure {
 public:
  BlockStructure() = default;
  BlockStructure(std::vector<Eigen::Index> output_dims, std::vector<Eigen::Index> measurement_dims);

  Eigen::Index player_count() const { return static_cast<Eigen::Index>(output_dims_.size()); }
  Eigen::Index output_dim(Eigen::Index i) const { return output_dims_[i]; }
  Eigen::Index measurement_dim(Eigen::Index i) const { return measurement_dims_[i]; }
  Eigen::Index output_offset(Eigen::Index i) const { return output_offsets_[i]; }
  Eigen::Index measurement_offset(Eigen::Index i) const { return measurement_offsets_[i]; }
  Eigen::Index total_outputs() const { return total_outputs_; }            // m
  Eigen::Index total_measurements() const { return total_measurements_; }  // p

  /// Number of free gain parameters, sum_i m_i p_i.
  Eigen::Index parameter_count() const { return parameter_count_; }
  /// Offset of block i inside the parameter vector (row-major within blocks).
  Eigen::Index parameter_offset(Eigen::Index i) const { return parameter_offsets_[i]; }

  /// sum_i m_i^2 p_i^2, the dimension factor of the bandit schedules.
  double sum_squared_block_sizes() const;

  const std::vector<Eigen::Index>& output_dims() const { return output_dims_; }
  const std::vector<Eigen::Index>& measurement_dims() const { return measurement_dims_; }

  bool operator==(const BlockStructure& other) const {
    return output_dims_ == other.output_dims_ && measurement_dims_ == other.measurement_dims_;
  }

 private:
  std::vector<Eigen::Index> output_dims_;
  std::vector<Eigen::Index> measurement_dims_;
  std::vector<Eigen::Index> output_offsets_;
  std::vector<Eigen::Index> measurement_offsets_;
  std::vector<Eigen::Index> parameter_offsets_;
  Eigen::Index total_outputs_ = 0;
  Eigen::Index total_measurements_ = 0;
  Eigen::Index parameter_count_ = 0;
};

}  // namespace teamdec
