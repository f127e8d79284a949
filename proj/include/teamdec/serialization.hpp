#pragma once

#include <string>

#include "teamdec/policy.hpp"
#include "teamdec/problem.hpp"
#include "teamdec/robust.hpp"

namespace teamdec {

// Instance documents are JSON with row-major nested arrays of decimal floats:
//   {"output_dims": [..], "measurement_dims": [..],
//    "H": [[..],..], "D": [[..],..], "C": [[..],..],
//    "Vxx": [[..],..], "Vvv": [[..],..]}
// Robust documents use the same schema without the covariances. Policies are
// stored as {"blocks": [[[..],..], ..]}.

std::string instance_to_json(const ProblemInstance& p);
ProblemInstance instance_from_json(const std::string& text);

std::string robust_instance_to_json(const RobustInstance& r);
RobustInstance robust_instance_from_json(const std::string& text);

std::string policy_to_json(const Policy& k);
Policy policy_from_json(const std::string& text);

/// Validated instance loaded from a JSON document on disk.
ProblemInstance load_instance(const std::string& path);
RobustInstance load_robust_instance(const std::string& path);

void save_instance(const ProblemInstance& p, const std::string& path);
void save_robust_instance(const RobustInstance& r, const std::string& path);

}  // namespace teamdec
