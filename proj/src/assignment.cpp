#include "crtrack/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace crtrack {

namespace {

// Cost assigned to forbidden and padding cells. Large enough that the solver
// prefers any chain of real cells, small enough to keep double arithmetic
// exact for the modest cost magnitudes used in this project.
constexpr double kBig = 1 << 30;

}  // namespace

Assignment solve_assignment(const CostMatrix& cost) {
  const int rows = cost.rows();
  const int cols = cost.cols();
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (!cost.is_forbidden(i, j) && !std::isfinite(cost.cost(i, j)))
        throw std::invalid_argument("solve_assignment: non-finite cost");

  Assignment out;
  if (rows == 0 || cols == 0) {
    for (int i = 0; i < rows; ++i) out.unmatched_rows.push_back(i);
    for (int j = 0; j < cols; ++j) out.unmatched_cols.push_back(j);
    return out;
  }

  // Square padded matrix: padding cells cost kBig, so every real match that is
  // feasible without a forbidden cell is taken before any padding one.
  const int n = std::max(rows, cols);
  auto cell = [&](int i, int j) -> double {
    if (i >= rows || j >= cols || cost.is_forbidden(i, j)) return kBig;
    return cost.cost(i, j);
  };

  // Kuhn-Munkres with row/column potentials, 1-based internals.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match_col(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match_col[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = match_col[j0];
      double delta = std::numeric_limits<double>::infinity();
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cell(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match_col[j0] != 0);
    do {
      const int j1 = way[j0];
      match_col[j0] = match_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(rows, -1);
  for (int j = 1; j <= n; ++j) {
    const int i = match_col[j] - 1;
    if (i >= 0 && i < rows && j - 1 < cols) row_to_col[i] = j - 1;
  }

  std::vector<char> col_matched(cols, false);
  for (int i = 0; i < rows; ++i) {
    const int j = row_to_col[i];
    if (j >= 0 && !cost.is_forbidden(i, j)) {
      out.matches.emplace_back(i, j);
      out.total_cost += cost.cost(i, j);
      col_matched[j] = true;
    } else {
      out.unmatched_rows.push_back(i);
    }
  }
  for (int j = 0; j < cols; ++j)
    if (!col_matched[j]) out.unmatched_cols.push_back(j);
  return out;
}

}  // namespace crtrack
