#pragma once

#include <Eigen/Dense>

#include <vector>

#include "rmab/arm_model.hpp"

namespace rmab::test {

inline Eigen::MatrixXd matrix(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

/// N = 3 reference arms: mu = 4/3, 1.5, 13/14.
inline std::vector<ArmModel> reference_arms(PassiveMode mode = PassiveMode::Frozen) {
  return {
      ArmModel({1.0, 2.0}, matrix({{0.9, 0.1}, {0.2, 0.8}}), mode),
      ArmModel({1.0, 2.0}, matrix({{0.5, 0.5}, {0.5, 0.5}}), mode),
      ArmModel({0.5, 1.5}, matrix({{0.7, 0.3}, {0.4, 0.6}}), mode),
  };
}

}  // namespace rmab::test
