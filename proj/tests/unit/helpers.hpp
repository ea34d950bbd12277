#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <Eigen/Dense>

#include "rbal/decision.hpp"

namespace testing {

// Fresh empty directory under the build tree.
inline std::string scratch_dir(const std::string& name) {
  const auto path = std::filesystem::path(RBAL_TEST_TMP) / name;
  std::filesystem::remove_all(path);
  std::filesystem::create_directories(path);
  return path.string();
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline rbal::Belief belief_of(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return rbal::Belief(v);
}

}  // namespace testing
