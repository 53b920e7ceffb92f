#pragma once

// Test-only reference implementations, kept independent of the library code
// paths they check.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mgmm/dynamics.hpp"
#include "mgmm/geometry.hpp"
#include "mgmm/motionmap.hpp"
#include "mgmm/tour.hpp"
#include "mgmm/world.hpp"

namespace oracle {

// ---- dynamics: scalar re-implementation of the motion equations ----------

struct FlatState {
  double x, y, theta, psi, v;
  std::vector<double> trailer;
};

inline FlatState from_state(const mgmm::RobotState& s) {
  return {s.x, s.y, s.theta, s.psi, s.v, s.trailer};
}

inline std::vector<double> derivative(const FlatState& s, double acc, double omega,
                                      double L, double H) {
  std::vector<double> d(5 + s.trailer.size());
  d[0] = s.v * std::cos(s.theta) * std::cos(s.psi);
  d[1] = s.v * std::sin(s.theta) * std::cos(s.psi);
  d[2] = s.v * std::sin(s.psi) / L;
  d[3] = omega;
  d[4] = acc;
  double prod = 1.0;
  double prev = s.theta;
  for (size_t i = 0; i < s.trailer.size(); ++i) {
    d[5 + i] = (s.v / H) * std::sin(prev - s.trailer[i]) * prod;
    prod *= std::cos(prev - s.trailer[i]);
    prev = s.trailer[i];
  }
  return d;
}

inline FlatState add_scaled(const FlatState& s, const std::vector<double>& d, double h) {
  FlatState r = s;
  r.x += h * d[0];
  r.y += h * d[1];
  r.theta += h * d[2];
  r.psi += h * d[3];
  r.v += h * d[4];
  for (size_t i = 0; i < r.trailer.size(); ++i) r.trailer[i] += h * d[5 + i];
  return r;
}

/// Reference integration: `substeps` classical RK4 steps over dt, then the
/// same clamp the production integrator applies.
inline FlatState fine_integrate(const mgmm::RobotModel& m, const mgmm::RobotState& s0,
                                const mgmm::Action& a, double dt, int substeps) {
  FlatState s = from_state(s0);
  const double h = dt / substeps;
  for (int k = 0; k < substeps; ++k) {
    const auto k1 = derivative(s, a.acc, a.omega, m.wheelbase, m.hitch);
    const auto k2 = derivative(add_scaled(s, k1, 0.5 * h), a.acc, a.omega, m.wheelbase, m.hitch);
    const auto k3 = derivative(add_scaled(s, k2, 0.5 * h), a.acc, a.omega, m.wheelbase, m.hitch);
    const auto k4 = derivative(add_scaled(s, k3, h), a.acc, a.omega, m.wheelbase, m.hitch);
    FlatState n = s;
    const double w = h / 6.0;
    n.x += w * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
    n.y += w * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
    n.theta += w * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]);
    n.psi += w * (k1[3] + 2 * k2[3] + 2 * k3[3] + k4[3]);
    n.v += w * (k1[4] + 2 * k2[4] + 2 * k3[4] + k4[4]);
    for (size_t i = 0; i < n.trailer.size(); ++i) {
      n.trailer[i] += w * (k1[5 + i] + 2 * k2[5 + i] + 2 * k3[5 + i] + k4[5 + i]);
    }
    s = n;
  }
  s.v = std::clamp(s.v, -m.limits.v_max, m.limits.v_max);
  s.psi = std::clamp(s.psi, -m.limits.psi_max, m.limits.psi_max);
  return s;
}

// ---- graphs: Bellman-Ford ---------------------------------------------------

inline std::vector<double> bellman_ford(
    const std::vector<std::vector<mgmm::AdjEntry>>& adj, int source) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(adj.size(), inf);
  dist[static_cast<size_t>(source)] = 0.0;
  for (size_t round = 0; round + 1 < adj.size(); ++round) {
    bool changed = false;
    for (size_t u = 0; u < adj.size(); ++u) {
      if (dist[u] == inf) continue;
      for (const auto& e : adj[u]) {
        if (dist[u] + e.w < dist[static_cast<size_t>(e.to)]) {
          dist[static_cast<size_t>(e.to)] = dist[u] + e.w;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  return dist;
}

// ---- tours: exhaustive minimum ----------------------------------------------

inline double brute_force_tour_cost(const mgmm::CostMatrix& m, int start,
                                    std::vector<int> remaining) {
  std::sort(remaining.begin(), remaining.end());
  double best = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    int cur = start;
    for (int g : remaining) {
      cost += m.at(cur, g + 1);
      cur = g + 1;
    }
    best = std::min(best, cost);
  } while (std::next_permutation(remaining.begin(), remaining.end()));
  return best;
}

// ---- collision: dense boundary sampling -------------------------------------

/// Collision verdict for the car footprint from 1000 perimeter points plus
/// the center (catches full containment).
inline bool car_sampling_collides(const mgmm::Scene& scene, const mgmm::RobotModel& m,
                                  const mgmm::RobotState& s) {
  const auto box = mgmm::Obb{{s.x, s.y}, s.theta, m.body_half_len(), m.body_half_wid()};
  const auto corners = box.corners();
  std::vector<mgmm::Vec2> pts{box.center};
  const int per_side = 250;
  for (int side = 0; side < 4; ++side) {
    const mgmm::Vec2 a = corners[static_cast<size_t>(side)];
    const mgmm::Vec2 b = corners[static_cast<size_t>((side + 1) % 4)];
    for (int i = 0; i < per_side; ++i) {
      const double t = static_cast<double>(i) / per_side;
      pts.push_back(a + (b - a) * t);
    }
  }
  for (const auto& p : pts) {
    if (!scene.bounds.contains(p)) return true;
    for (const auto& o : scene.obstacles) {
      const auto r = o.aabb();
      if (p.x >= r.xmin && p.x <= r.xmax && p.y >= r.ymin && p.y <= r.ymax) return true;
    }
  }
  return false;
}

}  // namespace oracle
