#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace crtrack {

// Dense row-major matrix of doubles. Deliberately minimal; Eigen stays
// confined to the Kalman filter.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

  double& at(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  double at(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
};

// Cost matrix with a forbidden mask; forbidden cells must never be matched.
struct CostMatrix {
  Matrix values;
  std::vector<std::uint8_t> mask;

  CostMatrix() = default;
  CostMatrix(int r, int c, double fill = 0.0)
      : values(r, c, fill), mask(static_cast<std::size_t>(r) * c, 0) {}

  int rows() const { return values.rows; }
  int cols() const { return values.cols; }

  double cost(int i, int j) const { return values.at(i, j); }
  void set_cost(int i, int j, double v) { values.at(i, j) = v; }

  bool is_forbidden(int i, int j) const {
    return mask[static_cast<std::size_t>(i) * cols() + j] != 0;
  }
  void forbid(int i, int j) { mask[static_cast<std::size_t>(i) * cols() + j] = 1; }
};

}  // namespace crtrack
