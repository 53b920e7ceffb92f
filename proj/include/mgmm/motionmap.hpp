#pragma once

#include <map>
#include <utility>
#include <vector>

#include "mgmm/rng.hpp"
#include "mgmm/world.hpp"

namespace mgmm {

/// Predicted/guide paths per ordered leg. Key (-1, j) is the start leg to
/// goal j; key (i, j) the leg from goal i to goal j.
using PathSet = std::map<std::pair<int, int>, std::vector<Vec2>>;

struct MapPath {
  std::vector<Vec2> coords;
  double cost = 0.0;
  bool fallback = false;  // graph had no route; coords come from the guide path
};

struct AdjEntry {
  int to = 0;
  double w = 0.0;
};

struct DijkstraResult {
  std::vector<double> dist;
  std::vector<int> parent;
};

/// Weighted graph of collision-free planar configurations with per-leg
/// shortest paths between the start and the goals.
struct MotionMap {
  std::vector<Vec2> nodes;
  std::vector<std::vector<AdjEntry>> adj;
  int start_anchor = -1;
  std::vector<int> goal_anchors;
  std::map<std::pair<int, int>, MapPath> paths;

  // uniform-grid index over nodes for nearest queries
  double cell = 2.0;
  std::map<std::pair<int, int>, std::vector<int>> grid;

  void build_index(double cell_size);
  /// Nearest node within `max_dist` of p, or -1.
  int nearest_node(Vec2 p, double max_dist) const;
};

struct MapParams {
  double r_vic = 1.0;
  double r_conn = 2.5;
  int vic_tries = 5;
  double edge_step = 0.1;
  double inflate = 0.6;     // point-footprint inflation radius
  int repair_rounds = 12;   // extra sampling passes for disconnected legs
  double repair_growth = 1.5;  // vicinity radius growth per repair round
};

/// Exact shortest paths from `source` over an adjacency list; dist is +inf
/// for unreachable nodes.
DijkstraResult dijkstra(const std::vector<std::vector<AdjEntry>>& adj, int source);

/// Fills map.paths with graph shortest paths for every start leg and ordered
/// goal pair. Returns the keys the graph could not serve (disconnected), for
/// which callers install fallbacks.
std::vector<std::pair<int, int>> shortest_paths(MotionMap& map, int n_goals);

/// Builds the guide-path-directed motion map: one vicinity sample per guide
/// coordinate, radius-bounded connections, per-leg Dijkstra, and guide-path
/// fallbacks for disconnected legs.
MotionMap generate_motion_map(const Scene& scene, Vec2 start,
                              const PathSet& guide, const MapParams& params,
                              Rng& rng);

}  // namespace mgmm
