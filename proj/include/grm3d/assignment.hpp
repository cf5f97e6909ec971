#pragma once

#include <vector>

namespace grm3d {

/// Dense rows x cols cost matrix, row-major.
struct CostMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  CostMatrix() = default;
  CostMatrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), values(static_cast<std::size_t>(r) * c, fill) {}
  double operator()(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
  double& operator()(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
};

struct Assignment {
  std::vector<int> row_to_col;  // -1 when the row is left unassigned
  double total_cost = 0.0;
};

/// Minimum-cost rectangular assignment (Kuhn-Munkres with potentials).
/// Exactly min(rows, cols) pairs are matched.
Assignment solve_assignment(const CostMatrix& cost);

/// Same optimum as solve_assignment, but among equal-cost optima picks the one
/// whose assignment vector, read along the smaller dimension, is lexicographically
/// smallest. Costs within `tolerance` of the optimum count as equal.
Assignment solve_assignment_lexicographic(const CostMatrix& cost, double tolerance = 1e-9);

}  // namespace grm3d
