#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "grm3d/assignment.hpp"
#include "grm3d/errors.hpp"

using namespace grm3d;

namespace {

// Minimum over all injections of the smaller side into the larger one.
double brute_force_min(const CostMatrix& c) {
  const bool rows_small = c.rows <= c.cols;
  const int small = rows_small ? c.rows : c.cols;
  const int large = rows_small ? c.cols : c.rows;
  std::vector<int> perm(static_cast<std::size_t>(large));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (int i = 0; i < small; ++i) s += rows_small ? c(i, perm[static_cast<std::size_t>(i)]) : c(perm[static_cast<std::size_t>(i)], i);
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double cost_of(const CostMatrix& c, const Assignment& a) {
  double s = 0.0;
  for (int r = 0; r < c.rows; ++r)
    if (a.row_to_col[static_cast<std::size_t>(r)] >= 0) s += c(r, a.row_to_col[static_cast<std::size_t>(r)]);
  return s;
}

void check_valid(const CostMatrix& c, const Assignment& a) {
  REQUIRE(a.row_to_col.size() == static_cast<std::size_t>(c.rows));
  std::vector<int> used(static_cast<std::size_t>(c.cols), 0);
  int matched = 0;
  for (int col : a.row_to_col) {
    if (col < 0) continue;
    REQUIRE(col < c.cols);
    CHECK(++used[static_cast<std::size_t>(col)] == 1);
    ++matched;
  }
  CHECK(matched == std::min(c.rows, c.cols));
}

}  // namespace

TEST_SUITE("assignment") {

TEST_CASE("hand-checked 3x3") {
  CostMatrix c(3, 3);
  c.values = {4, 1, 3, 2, 0, 5, 3, 2, 2};
  const Assignment a = solve_assignment(c);
  CHECK(a.total_cost == 5.0);
  CHECK(a.row_to_col == std::vector<int>{1, 0, 2});
}

TEST_CASE("rectangular shapes") {
  CostMatrix wide(2, 4);
  wide.values = {9, 9, 1, 9, 9, 9, 9, 2};
  Assignment a = solve_assignment(wide);
  CHECK(a.row_to_col == std::vector<int>{2, 3});
  CHECK(a.total_cost == 3.0);

  CostMatrix tall(3, 1);
  tall.values = {5, 1, 7};
  a = solve_assignment(tall);
  CHECK(a.row_to_col == std::vector<int>{-1, 0, -1});
  CHECK(a.total_cost == 1.0);
}

TEST_CASE("empty matrices") {
  CHECK(solve_assignment(CostMatrix(0, 3)).row_to_col.empty());
  CHECK(solve_assignment(CostMatrix(2, 0)).row_to_col == std::vector<int>{-1, -1});
}

TEST_CASE("random instances agree with permutation brute force") {
  std::mt19937 rng(42);
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::uniform_int_distribution<int> small(0, 3);
  for (int t = 0; t < 300; ++t) {
    CostMatrix c(dim(rng), dim(rng));
    // integer costs provoke ties
    for (double& v : c.values) v = (t % 2) ? u(rng) : small(rng);
    const Assignment a = solve_assignment(c);
    check_valid(c, a);
    CHECK(a.total_cost == doctest::Approx(brute_force_min(c)).epsilon(1e-12));
    CHECK(cost_of(c, a) == doctest::Approx(a.total_cost).epsilon(1e-12));
    const Assignment l = solve_assignment_lexicographic(c);
    check_valid(c, l);
    CHECK(l.total_cost == doctest::Approx(a.total_cost).epsilon(1e-12));
  }
}

TEST_CASE("lexicographic tie rule picks the lowest-index optimum") {
  CostMatrix c(2, 2, 1.0);  // both permutations cost 2
  CHECK(solve_assignment_lexicographic(c).row_to_col == std::vector<int>{0, 1});
  CostMatrix d(3, 3);
  d.values = {1, 1, 5, 1, 1, 5, 5, 5, 0};
  CHECK(solve_assignment_lexicographic(d).row_to_col == std::vector<int>{0, 1, 2});
  CostMatrix tall(3, 2, 0.0);
  CHECK(solve_assignment_lexicographic(tall).row_to_col == std::vector<int>{0, 1, -1});
}

TEST_CASE("non-finite costs and bad shapes are rejected") {
  CostMatrix c(2, 2);
  c(0, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(solve_assignment(c), DomainError);
  CostMatrix bad(2, 2);
  bad.values.pop_back();
  CHECK_THROWS_AS(solve_assignment(bad), ShapeError);
}

}  // TEST_SUITE
