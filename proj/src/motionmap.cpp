#include "mgmm/motionmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "mgmm/effort.hpp"

namespace mgmm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::pair<int, int> cell_of(Vec2 p, double cell) {
  return {static_cast<int>(std::floor(p.x / cell)), static_cast<int>(std::floor(p.y / cell))};
}

}  // namespace

void MotionMap::build_index(double cell_size) {
  cell = cell_size;
  grid.clear();
  for (size_t i = 0; i < nodes.size(); ++i) {
    grid[cell_of(nodes[i], cell)].push_back(static_cast<int>(i));
  }
}

int MotionMap::nearest_node(Vec2 p, double max_dist) const {
  const auto [cx, cy] = cell_of(p, cell);
  const int reach = static_cast<int>(std::ceil(max_dist / cell));
  int best = -1;
  double best_d = max_dist;
  auto& m = effort();
  for (int dx = -reach; dx <= reach; ++dx) {
    for (int dy = -reach; dy <= reach; ++dy) {
      const auto it = grid.find({cx + dx, cy + dy});
      if (it == grid.end()) continue;
      for (int i : it->second) {
        ++m.graph_ops;
        const double d = distance(nodes[static_cast<size_t>(i)], p);
        if (d < best_d || (d == best_d && (best < 0 || i < best))) {
          best_d = d;
          best = i;
        }
      }
    }
  }
  return best;
}

DijkstraResult dijkstra(const std::vector<std::vector<AdjEntry>>& adj, int source) {
  const size_t n = adj.size();
  DijkstraResult res;
  res.dist.assign(n, kInf);
  res.parent.assign(n, -1);
  res.dist[static_cast<size_t>(source)] = 0.0;

  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  heap.emplace(0.0, source);
  auto& m = effort();
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    ++m.graph_ops;
    if (d > res.dist[static_cast<size_t>(u)]) continue;
    for (const AdjEntry& e : adj[static_cast<size_t>(u)]) {
      ++m.graph_ops;
      const double nd = d + e.w;
      if (nd < res.dist[static_cast<size_t>(e.to)]) {
        res.dist[static_cast<size_t>(e.to)] = nd;
        res.parent[static_cast<size_t>(e.to)] = u;
        heap.emplace(nd, e.to);
      }
    }
  }
  return res;
}

namespace {

MapPath extract_path(const MotionMap& map, const DijkstraResult& d, int target) {
  MapPath p;
  p.cost = d.dist[static_cast<size_t>(target)];
  std::vector<int> rev;
  for (int cur = target; cur >= 0; cur = d.parent[static_cast<size_t>(cur)]) rev.push_back(cur);
  for (auto it = rev.rbegin(); it != rev.rend(); ++it) {
    p.coords.push_back(map.nodes[static_cast<size_t>(*it)]);
  }
  return p;
}

}  // namespace

std::vector<std::pair<int, int>> shortest_paths(MotionMap& map, int n_goals) {
  std::vector<std::pair<int, int>> missing;

  const DijkstraResult from_start = dijkstra(map.adj, map.start_anchor);
  for (int j = 0; j < n_goals; ++j) {
    const int anchor = map.goal_anchors[static_cast<size_t>(j)];
    if (from_start.dist[static_cast<size_t>(anchor)] < kInf) {
      map.paths[{-1, j}] = extract_path(map, from_start, anchor);
    } else {
      missing.emplace_back(-1, j);
    }
  }
  for (int i = 0; i < n_goals; ++i) {
    const DijkstraResult d = dijkstra(map.adj, map.goal_anchors[static_cast<size_t>(i)]);
    for (int j = 0; j < n_goals; ++j) {
      if (i == j) continue;
      const int anchor = map.goal_anchors[static_cast<size_t>(j)];
      if (d.dist[static_cast<size_t>(anchor)] < kInf) {
        map.paths[{i, j}] = extract_path(map, d, anchor);
      } else {
        missing.emplace_back(i, j);
      }
    }
  }
  return missing;
}

namespace {

void sample_along(MotionMap& map, const Scene& scene, const std::vector<Vec2>& coords,
                  double radius, int tries, double inflate, Rng& rng) {
  for (const Vec2& p : coords) {
    for (int t = 0; t < tries; ++t) {
      const double r = radius * std::sqrt(rng.uniform());
      const double a = rng.uniform(0.0, 2.0 * kPi);
      const Vec2 cand{p.x + r * std::cos(a), p.y + r * std::sin(a)};
      if (!point_colliding(scene, cand, inflate)) {
        map.nodes.push_back(cand);
        break;
      }
    }
  }
}

// Connects nodes [first_new, end) to neighbors within r_conn, nearest first,
// at most kMaxDegree accepted links per new node. The cap keeps the edge
// count linear where samples cluster along shared corridors.
constexpr int kMaxDegree = 5;

void connect_from(MotionMap& map, const Scene& scene, const MapParams& params,
                  size_t first_new) {
  map.adj.resize(map.nodes.size());
  map.build_index(params.r_conn);
  for (size_t i = first_new; i < map.nodes.size(); ++i) {
    const auto [cx, cy] = cell_of(map.nodes[i], map.cell);
    std::vector<std::pair<double, int>> cands;
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        const auto it = map.grid.find({cx + dx, cy + dy});
        if (it == map.grid.end()) continue;
        for (int j : it->second) {
          if (j >= static_cast<int>(i)) continue;
          const double d = distance(map.nodes[i], map.nodes[static_cast<size_t>(j)]);
          if (d <= params.r_conn) cands.emplace_back(d, j);
        }
      }
    }
    std::sort(cands.begin(), cands.end());
    int accepted = 0;
    for (const auto& [d, j] : cands) {
      if (accepted >= kMaxDegree) break;
      if (segment_colliding(scene, map.nodes[i], map.nodes[static_cast<size_t>(j)],
                            params.inflate, params.edge_step)) {
        continue;
      }
      map.adj[i].push_back({j, d});
      map.adj[static_cast<size_t>(j)].push_back({static_cast<int>(i), d});
      ++accepted;
    }
  }
}

}  // namespace

MotionMap generate_motion_map(const Scene& scene, Vec2 start, const PathSet& guide,
                              const MapParams& params, Rng& rng) {
  MotionMap map;
  const int n_goals = static_cast<int>(scene.goals.size());

  map.start_anchor = static_cast<int>(map.nodes.size());
  map.nodes.push_back(start);
  for (const auto& g : scene.goals) {
    map.goal_anchors.push_back(static_cast<int>(map.nodes.size()));
    map.nodes.push_back(g.center);
  }

  // One vicinity sample per guide coordinate. Legs share corridors (and the
  // start legs reuse goal-pair paths verbatim), so coordinates closer than
  // half the vicinity radius to an already-sampled one are redundant for
  // connectivity and are skipped.
  {
    std::map<std::pair<int, int>, std::vector<Vec2>> seen;
    const double spacing = 1.0 * params.r_vic;
    std::vector<Vec2> coords;
    for (const auto& [key, leg] : guide) {
      for (const Vec2& p : leg) {
        const auto cell = cell_of(p, spacing);
        bool near = false;
        for (int dx = -1; dx <= 1 && !near; ++dx) {
          for (int dy = -1; dy <= 1 && !near; ++dy) {
            const auto it = seen.find({cell.first + dx, cell.second + dy});
            if (it == seen.end()) continue;
            for (const Vec2& q : it->second) {
              if (distance(p, q) < spacing) {
                near = true;
                break;
              }
            }
          }
        }
        if (near) continue;
        seen[cell].push_back(p);
        coords.push_back(p);
      }
    }
    sample_along(map, scene, coords, params.r_vic, params.vic_tries, params.inflate, rng);
  }
  connect_from(map, scene, params, 0);
  auto missing = shortest_paths(map, n_goals);

  // Legs the graph cannot serve get repair passes, repeated until every goal
  // pair is connected or the rounds run out. Early rounds resample a widening
  // band around the missing legs' predicted trajectories; once the band stops
  // helping, later rounds fall back to plain uniform batches so that poor
  // predictions degrade to an ordinary roadmap instead of a dead end. A
  // minimum spacing to existing nodes keeps the edge count bounded.
  double radius = params.r_vic;
  const int banded_rounds = params.repair_rounds / 3;
  for (int round = 1; round <= params.repair_rounds && !missing.empty(); ++round) {
    radius = std::min(radius * params.repair_growth, 0.45 * scene.bounds.width());
    std::vector<Vec2> anchors;
    if (round <= banded_rounds) {
      for (const auto& key : missing) {
        const auto it = guide.find(key);
        if (it == guide.end() || it->second.empty()) continue;
        anchors.insert(anchors.end(), it->second.begin(), it->second.end());
      }
    }

    const size_t first_new = map.nodes.size();
    const int attempts = 300;
    for (int a = 0; a < attempts; ++a) {
      Vec2 cand;
      if (!anchors.empty()) {
        const Vec2 p = anchors[rng.index(anchors.size())];
        const double r = radius * std::sqrt(rng.uniform());
        const double ang = rng.uniform(0.0, 2.0 * kPi);
        cand = {p.x + r * std::cos(ang), p.y + r * std::sin(ang)};
      } else {
        cand = {rng.uniform(scene.bounds.xmin, scene.bounds.xmax),
                rng.uniform(scene.bounds.ymin, scene.bounds.ymax)};
      }
      if (!scene.bounds.contains(cand)) continue;
      // Spacing floor below half a door channel so repair can seed narrow
      // passages next to existing approach nodes.
      if (map.nearest_node(cand, 0.45) >= 0) continue;
      if (point_colliding(scene, cand, params.inflate)) continue;
      map.nodes.push_back(cand);
    }
    if (map.nodes.size() == first_new) continue;
    connect_from(map, scene, params, first_new);

    // Retry only the still-missing legs, one Dijkstra per missing source.
    std::vector<int> sources;
    for (const auto& key : missing) {
      if (std::find(sources.begin(), sources.end(), key.first) == sources.end()) {
        sources.push_back(key.first);
      }
    }
    std::vector<std::pair<int, int>> still;
    for (int src : sources) {
      const int src_anchor = src < 0 ? map.start_anchor
                                     : map.goal_anchors[static_cast<size_t>(src)];
      const DijkstraResult d = dijkstra(map.adj, src_anchor);
      for (const auto& key : missing) {
        if (key.first != src) continue;
        const int dst = map.goal_anchors[static_cast<size_t>(key.second)];
        if (d.dist[static_cast<size_t>(dst)] < kInf) {
          map.paths[key] = extract_path(map, d, dst);
        } else {
          still.push_back(key);
        }
      }
    }
    missing = std::move(still);
  }

  for (const auto& key : missing) {
    MapPath p;
    const auto it = guide.find(key);
    if (it != guide.end()) p.coords = it->second;
    p.fallback = true;
    p.cost = polyline_length(p.coords);
    map.paths[key] = p;
  }
  return map;
}

}  // namespace mgmm
