#pragma once

#include <utility>
#include <vector>

#include "crtrack/matrix.hpp"

namespace crtrack {

struct Assignment {
  std::vector<std::pair<int, int>> matches;  // (row, col), sorted by row
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
  double total_cost = 0.0;
};

// Minimum-cost one-to-one matching. Cardinality is maximised first over the
// non-forbidden cells, then total cost is minimised; forbidden cells are never
// matched. O(n^3) Kuhn-Munkres with potentials.
Assignment solve_assignment(const CostMatrix& cost);

}  // namespace crtrack
