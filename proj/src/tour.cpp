#include "mgmm/tour.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace mgmm {

Tour greedy_tour(const CostMatrix& m, int start_index, const std::vector<int>& remaining) {
  if (remaining.empty()) throw std::invalid_argument("greedy_tour: no goals remain");
  std::vector<int> left = remaining;
  std::sort(left.begin(), left.end());
  Tour tour;
  int cur = start_index;
  while (!left.empty()) {
    size_t best = 0;
    for (size_t i = 1; i < left.size(); ++i) {
      if (m.at(cur, left[i] + 1) < m.at(cur, left[best] + 1)) best = i;
    }
    tour.cost += m.at(cur, left[best] + 1);
    cur = left[best] + 1;
    tour.order.push_back(left[best]);
    left.erase(left.begin() + static_cast<long>(best));
  }
  return tour;
}

Tour exact_tour(const CostMatrix& m, int start_index, const std::vector<int>& remaining) {
  if (remaining.empty()) throw std::invalid_argument("exact_tour: no goals remain");
  const int k = static_cast<int>(remaining.size());
  if (k > 15) throw std::invalid_argument("exact_tour: instance too large (> 15 goals)");

  std::vector<int> goals = remaining;
  std::sort(goals.begin(), goals.end());

  const size_t full = size_t{1} << k;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // dp[mask][last]: cheapest path from start visiting `mask`, ending at `last`.
  std::vector<double> dp(full * static_cast<size_t>(k), kInf);
  std::vector<int> parent(full * static_cast<size_t>(k), -1);
  const auto idx = [k](size_t mask, int last) {
    return mask * static_cast<size_t>(k) + static_cast<size_t>(last);
  };

  for (int i = 0; i < k; ++i) {
    dp[idx(size_t{1} << i, i)] = m.at(start_index, goals[static_cast<size_t>(i)] + 1);
  }
  for (size_t mask = 1; mask < full; ++mask) {
    for (int last = 0; last < k; ++last) {
      if (!(mask & (size_t{1} << last))) continue;
      const double base = dp[idx(mask, last)];
      if (base == kInf) continue;
      for (int nxt = 0; nxt < k; ++nxt) {
        if (mask & (size_t{1} << nxt)) continue;
        const size_t nmask = mask | (size_t{1} << nxt);
        const double cand = base + m.at(goals[static_cast<size_t>(last)] + 1,
                                        goals[static_cast<size_t>(nxt)] + 1);
        if (cand < dp[idx(nmask, nxt)]) {
          dp[idx(nmask, nxt)] = cand;
          parent[idx(nmask, nxt)] = last;
        }
      }
    }
  }

  const size_t all = full - 1;
  int best_last = 0;
  for (int i = 1; i < k; ++i) {
    if (dp[idx(all, i)] < dp[idx(all, best_last)]) best_last = i;
  }

  Tour tour;
  tour.cost = dp[idx(all, best_last)];
  std::vector<int> rev;
  size_t mask = all;
  int last = best_last;
  while (last >= 0) {
    rev.push_back(goals[static_cast<size_t>(last)]);
    const int p = parent[idx(mask, last)];
    mask &= ~(size_t{1} << last);
    last = p;
  }
  tour.order.assign(rev.rbegin(), rev.rend());
  return tour;
}

}  // namespace mgmm
