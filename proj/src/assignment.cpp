#include "grm3d/assignment.hpp"

#include <cmath>
#include <limits>

#include "grm3d/errors.hpp"

namespace grm3d {
namespace {

CostMatrix transposed(const CostMatrix& m) {
  CostMatrix t(m.cols, m.rows);
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < m.cols; ++c) t(c, r) = m(r, c);
  return t;
}

Assignment flip(const Assignment& a, int original_rows) {
  Assignment out;
  out.total_cost = a.total_cost;
  out.row_to_col.assign(static_cast<std::size_t>(original_rows), -1);
  for (std::size_t r = 0; r < a.row_to_col.size(); ++r)
    if (a.row_to_col[r] >= 0) out.row_to_col[static_cast<std::size_t>(a.row_to_col[r])] = static_cast<int>(r);
  return out;
}

// rows <= cols; 1-based potentials formulation.
Assignment solve_wide(const CostMatrix& a) {
  const int n = a.rows;
  const int m = a.cols;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0), v(static_cast<std::size_t>(m) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(m) + 1, 0), way(static_cast<std::size_t>(m) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(m) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(m) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = a(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  Assignment out;
  out.row_to_col.assign(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= m; ++j)
    if (p[static_cast<std::size_t>(j)] != 0) out.row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  for (int i = 0; i < n; ++i) out.total_cost += a(i, out.row_to_col[static_cast<std::size_t>(i)]);
  return out;
}

void check(const CostMatrix& cost) {
  if (cost.rows < 0 || cost.cols < 0 ||
      cost.values.size() != static_cast<std::size_t>(cost.rows) * static_cast<std::size_t>(cost.cols))
    throw ShapeError("cost matrix size does not match its dimensions");
  for (double v : cost.values)
    if (!std::isfinite(v)) throw DomainError("cost matrix entries must be finite");
}

}  // namespace

Assignment solve_assignment(const CostMatrix& cost) {
  check(cost);
  if (cost.rows == 0 || cost.cols == 0) {
    return Assignment{std::vector<int>(static_cast<std::size_t>(cost.rows), -1), 0.0};
  }
  if (cost.rows <= cost.cols) return solve_wide(cost);
  return flip(solve_wide(transposed(cost)), cost.rows);
}

Assignment solve_assignment_lexicographic(const CostMatrix& cost, double tolerance) {
  check(cost);
  if (cost.rows > cost.cols) {
    return flip(solve_assignment_lexicographic(transposed(cost), tolerance), cost.rows);
  }
  const Assignment best = solve_assignment(cost);
  const double slack = tolerance * (1.0 + std::fabs(best.total_cost));
  const int n = cost.rows;
  const int m = cost.cols;

  std::vector<int> fixed(static_cast<std::size_t>(n), -1);
  std::vector<char> col_used(static_cast<std::size_t>(m), 0);
  double fixed_cost = 0.0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < m; ++c) {
      if (col_used[static_cast<std::size_t>(c)]) continue;
      // Remaining rows r+1.. against remaining columns minus c.
      std::vector<int> rest_cols;
      for (int cc = 0; cc < m; ++cc)
        if (!col_used[static_cast<std::size_t>(cc)] && cc != c) rest_cols.push_back(cc);
      CostMatrix sub(n - r - 1, static_cast<int>(rest_cols.size()));
      for (int rr = r + 1; rr < n; ++rr)
        for (std::size_t k = 0; k < rest_cols.size(); ++k) sub(rr - r - 1, static_cast<int>(k)) = cost(rr, rest_cols[k]);
      const double total = fixed_cost + cost(r, c) + solve_assignment(sub).total_cost;
      if (total <= best.total_cost + slack) {
        fixed[static_cast<std::size_t>(r)] = c;
        col_used[static_cast<std::size_t>(c)] = 1;
        fixed_cost += cost(r, c);
        break;
      }
    }
    if (fixed[static_cast<std::size_t>(r)] < 0) return best;  // numerical corner; keep solver optimum
  }
  Assignment out{fixed, fixed_cost};
  return out;
}

}  // namespace grm3d
