#include "teamdec/serialization.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "teamdec/errors.hpp"

namespace teamdec {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty()) fail(ErrorCode::InvalidConfig, name + " must be a nested array");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array()) fail(ErrorCode::InvalidConfig, name + " must be a nested array");
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != cols) {
      fail(ErrorCode::InvalidConfig, name + " has ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

std::vector<Eigen::Index> dims_from_json(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty()) fail(ErrorCode::InvalidConfig, name + " must be a list");
  std::vector<Eigen::Index> dims;
  for (const auto& v : j) dims.push_back(v.get<Eigen::Index>());
  return dims;
}

json require(const json& j, const std::string& key) {
  if (!j.contains(key)) fail(ErrorCode::InvalidConfig, "missing field: " + key);
  return j.at(key);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out << text;
}

}  // namespace

std::string instance_to_json(const ProblemInstance& p) {
  json j;
  j["output_dims"] = p.structure.output_dims();
  j["measurement_dims"] = p.structure.measurement_dims();
  j["H"] = matrix_to_json(p.H);
  j["D"] = matrix_to_json(p.D);
  j["C"] = matrix_to_json(p.C);
  j["Vxx"] = matrix_to_json(p.Vxx);
  j["Vvv"] = matrix_to_json(p.Vvv);
  return j.dump(2) + "\n";
}

ProblemInstance instance_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("bad JSON: ") + e.what());
  }
  ProblemInstance p;
  p.structure = BlockStructure(dims_from_json(require(j, "output_dims"), "output_dims"),
                               dims_from_json(require(j, "measurement_dims"), "measurement_dims"));
  p.H = matrix_from_json(require(j, "H"), "H");
  p.D = matrix_from_json(require(j, "D"), "D");
  p.C = matrix_from_json(require(j, "C"), "C");
  p.Vxx = matrix_from_json(require(j, "Vxx"), "Vxx");
  p.Vvv = matrix_from_json(require(j, "Vvv"), "Vvv");
  validate_instance(p);
  return p;
}

std::string robust_instance_to_json(const RobustInstance& r) {
  json j;
  j["output_dims"] = r.structure.output_dims();
  j["measurement_dims"] = r.structure.measurement_dims();
  j["H"] = matrix_to_json(r.H);
  j["D"] = matrix_to_json(r.D);
  j["C"] = matrix_to_json(r.C);
  return j.dump(2) + "\n";
}

RobustInstance robust_instance_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("bad JSON: ") + e.what());
  }
  RobustInstance r;
  r.structure = BlockStructure(dims_from_json(require(j, "output_dims"), "output_dims"),
                               dims_from_json(require(j, "measurement_dims"), "measurement_dims"));
  r.H = matrix_from_json(require(j, "H"), "H");
  r.D = matrix_from_json(require(j, "D"), "D");
  r.C = matrix_from_json(require(j, "C"), "C");
  validate_robust_instance(r);
  return r;
}

std::string policy_to_json(const Policy& k) {
  json blocks = json::array();
  for (const auto& b : k.blocks()) blocks.push_back(matrix_to_json(b));
  json j;
  j["blocks"] = std::move(blocks);
  return j.dump(2) + "\n";
}

Policy policy_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("bad JSON: ") + e.what());
  }
  const json jb = require(j, "blocks");
  if (!jb.is_array() || jb.empty()) fail(ErrorCode::InvalidConfig, "blocks must be a list");
  std::vector<Eigen::MatrixXd> blocks;
  std::vector<Eigen::Index> m_dims, p_dims;
  for (std::size_t i = 0; i < jb.size(); ++i) {
    blocks.push_back(matrix_from_json(jb[i], "blocks[" + std::to_string(i) + "]"));
    m_dims.push_back(blocks.back().rows());
    p_dims.push_back(blocks.back().cols());
  }
  return Policy(BlockStructure(m_dims, p_dims), std::move(blocks));
}

ProblemInstance load_instance(const std::string& path) {
  return instance_from_json(read_file(path));
}

RobustInstance load_robust_instance(const std::string& path) {
  return robust_instance_from_json(read_file(path));
}

void save_instance(const ProblemInstance& p, const std::string& path) {
  write_file(path, instance_to_json(p));
}

void save_robust_instance(const RobustInstance& r, const std::string& path) {
  write_file(path, robust_instance_to_json(r));
}

}  // namespace teamdec
