#pragma once

#include <vector>

namespace mgmm {

/// Start-plus-goals cost matrix in meters. Index 0 is the start; index i+1
/// is goal i. Asymmetric entries are allowed; the diagonal is zero.
struct CostMatrix {
  int n_goals = 0;
  std::vector<double> data;  // (n_goals+1)^2, row-major

  explicit CostMatrix(int goals = 0)
      : n_goals(goals),
        data(static_cast<size_t>(goals + 1) * (goals + 1), 0.0) {}

  int side() const { return n_goals + 1; }
  double& at(int from, int to) { return data[static_cast<size_t>(from) * side() + to]; }
  double at(int from, int to) const { return data[static_cast<size_t>(from) * side() + to]; }
};

/// Open tour: the order in which to visit the remaining goals, no return leg.
struct Tour {
  std::vector<int> order;  // goal indices (0-based)
  double cost = 0.0;
};

/// Nearest-unvisited-next ordering from `start` (matrix index: 0 = start,
/// i+1 = goal i). Ties go to the lowest goal index.
Tour greedy_tour(const CostMatrix& m, int start_index, const std::vector<int>& remaining);

/// Optimal open tour by Held-Karp dynamic programming; |remaining| <= 15.
Tour exact_tour(const CostMatrix& m, int start_index, const std::vector<int>& remaining);

}  // namespace mgmm
