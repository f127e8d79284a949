#include "teamdec/block_structure.hpp"

#include "teamdec/errors.hpp"

namespace teamdec {

BlockStructure::BlockStructure(std::vector<Eigen::Index> output_dims,
                               std::vector<Eigen::Index> measurement_dims)
    : output_dims_(std::move(output_dims)), measurement_dims_(std::move(measurement_dims)) {
  if (output_dims_.empty() || output_dims_.size() != measurement_dims_.size()) {
    fail(ErrorCode::DimensionMismatch, "need one (m_i, p_i) pair per player, at least one player");
  }
  output_offsets_.reserve(output_dims_.size());
  measurement_offsets_.reserve(output_dims_.size());
  parameter_offsets_.reserve(output_dims_.size());
  for (std::size_t i = 0; i < output_dims_.size(); ++i) {
    if (output_dims_[i] < 1 || measurement_dims_[i] < 1) {
      fail(ErrorCode::DimensionMismatch, "block dimensions must be strictly positive");
    }
    output_offsets_.push_back(total_outputs_);
    measurement_offsets_.push_back(total_measurements_);
    parameter_offsets_.push_back(parameter_count_);
    total_outputs_ += output_dims_[i];
    total_measurements_ += measurement_dims_[i];
    parameter_count_ += output_dims_[i] * measurement_dims_[i];
  }
}

double BlockStructure::sum_squared_block_sizes() const {
  double s = 0.0;
  for (std::size_t i = 0; i < output_dims_.size(); ++i) {
    double mp = static_cast<double>(output_dims_[i]) * static_cast<double>(measurement_dims_[i]);
    s += mp * mp;
  }
  return s;
}

}  // namespace teamdec
