#include "mgmm/planner.hpp"

#include <cassert>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "mgmm/effort.hpp"

namespace mgmm {

using json = nlohmann::json;

double group_priority(double tour_cost, int selections, double alpha,
                      double eps) {
  return std::pow(alpha, selections) / (eps + tour_cost);
}

namespace {

Vec2 random_free_point(const Scene& scene, double inflate, Rng& rng, int tries = 200) {
  Vec2 p{0.0, 0.0};
  for (int t = 0; t < tries; ++t) {
    p = {rng.uniform(scene.bounds.xmin, scene.bounds.xmax),
         rng.uniform(scene.bounds.ymin, scene.bounds.ymax)};
    if (!point_colliding(scene, p, inflate)) return p;
  }
  return p;
}

}  // namespace

Vec2 select_target(const Scene& scene, std::vector<Vec2>& pending, double r_vic,
                   int retries, double inflate, Rng& rng) {
  if (pending.empty()) return random_free_point(scene, inflate, rng);
  const Vec2 head = pending.front();
  for (int t = 0; t < retries; ++t) {
    const double r = r_vic * std::sqrt(rng.uniform());
    const double a = rng.uniform(0.0, 2.0 * kPi);
    const Vec2 cand{head.x + r * std::cos(a), head.y + r * std::sin(a)};
    if (!point_colliding(scene, cand, inflate)) {
      pending.erase(pending.begin());
      return cand;
    }
  }
  // The whole vicinity disc is blocked; drop the coordinate so the group can
  // progress along the rest of its guide path instead of regrinding it.
  pending.erase(pending.begin());
  return random_free_point(scene, inflate, rng);
}

namespace {

/// Incremental point index for nearest queries over tree nodes.
class PointGrid {
 public:
  explicit PointGrid(double cell) : cell_(cell) {}

  void insert(int id, Vec2 p) {
    points_.push_back(p);
    ids_.push_back(id);
    buckets_[key(p)].push_back(static_cast<int>(points_.size()) - 1);
  }

  int nearest(Vec2 p) const {
    const auto [cx, cy] = key(p);
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    auto& m = effort();
    for (int reach = 0; reach < 64; ++reach) {
      for (int dx = -reach; dx <= reach; ++dx) {
        for (int dy = -reach; dy <= reach; ++dy) {
          if (std::max(std::abs(dx), std::abs(dy)) != reach) continue;
          const auto it = buckets_.find({cx + dx, cy + dy});
          if (it == buckets_.end()) continue;
          for (int slot : it->second) {
            ++m.graph_ops;
            const double d = distance(points_[static_cast<size_t>(slot)], p);
            const int id = ids_[static_cast<size_t>(slot)];
            if (d < best_d || (d == best_d && id < best)) {
              best_d = d;
              best = id;
            }
          }
        }
      }
      if (best >= 0 && best_d <= static_cast<double>(reach) * cell_) break;
    }
    return best;
  }

 private:
  std::pair<int, int> key(Vec2 p) const {
    return {static_cast<int>(std::floor(p.x / cell_)),
            static_cast<int>(std::floor(p.y / cell_))};
  }

  double cell_;
  std::vector<Vec2> points_;
  std::vector<int> ids_;
  std::map<std::pair<int, int>, std::vector<int>> buckets_;
};

struct TreeNode {
  RobotState state;
  int parent = -1;
  Action action;
  uint32_t mask = 0;   // reached-goal bits
  int last_goal = -1;  // -1 until the chain has reached a goal
  int new_goal = -1;   // goal credited at this node, if any
  int group = -1;
};

struct Group {
  uint32_t mask = 0;
  int anchor = -1;  // map node id, or -1 for the nomad bucket
  int loc = -1;     // tour origin: -1 start, else goal index
  std::vector<int> members;
  Tour tour;
  std::vector<Vec2> pending;  // consumable guide coordinates
  bool progressing = true;    // last extension reached its target
  int selections = 0;
  double priority = 0.0;
};

/// Group-partitioned motion-tree search shared by the guided planner and the
/// roadmap baseline. The map supplies per-leg guide paths and group anchors;
/// the cost matrix supplies the tours.
class TreeSearch {
 public:
  TreeSearch(const Scene& scene, const RobotModel& model, const RobotState& s_init,
             const MotionMap& map, const CostMatrix& costs, const PlannerParams& p,
             Rng rng)
      : scene_(scene), model_(model), map_(map), costs_(costs), p_(p), rng_(rng) {
    full_mask_ = (uint32_t{1} << scene.goals.size()) - 1;
    inflate_ = model.circumradius();

    TreeNode root;
    root.state = s_init;
    for (size_t g = 0; g < scene.goals.size(); ++g) {
      if (scene.goals[g].contains(s_init.position())) {
        root.mask |= uint32_t{1} << g;
        root.last_goal = static_cast<int>(g);
        root.new_goal = static_cast<int>(g);
      }
    }
    nodes_.push_back(root);
    assign_group(0);
  }

  PlanResult run(const std::string& name, double started_at_budget_used = 0.0) {
    const EffortMeter start = effort();
    PlanResult res;
    res.planner = name;
    res.seed = p_.seed;
    res.budget_s = p_.budget_s;

    int solution = nodes_[0].mask == full_mask_ ? 0 : -1;
    const double pre = started_at_budget_used;
    while (solution < 0) {
      if (pre + (effort() - start).seconds() >= p_.budget_s) break;
      if (nodes_.size() >= p_.max_nodes) break;
      if (groups_.empty()) break;
      solution = expand_once();
    }

    res.runtime_s = pre + (effort() - start).seconds();
    res.tree_nodes = nodes_.size();
    res.groups = groups_.size();
    if (solution >= 0 && res.runtime_s <= p_.budget_s) {
      res.status = PlanStatus::solved;
      std::vector<int> chain;
      for (int cur = solution; cur >= 0; cur = nodes_[static_cast<size_t>(cur)].parent) {
        chain.push_back(cur);
      }
      res.trajectory.dt = p_.dt;
      for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        const TreeNode& n = nodes_[static_cast<size_t>(*it)];
        if (n.parent >= 0) res.trajectory.actions.push_back(n.action);
        res.trajectory.states.push_back(n.state);
        if (n.new_goal >= 0) res.goal_order.push_back(n.new_goal);
      }
      res.distance_m = res.trajectory.length();
    } else {
      res.status = PlanStatus::timeout;
      res.runtime_s = std::min(res.runtime_s, p_.budget_s);
    }
    return res;
  }

 private:
  // Returns the solution node id, or -1.
  int expand_once() {
    // Highest priority wins; ties go to the older group.
    size_t best = 0;
    for (size_t i = 1; i < groups_.size(); ++i) {
      if (groups_[i].priority > groups_[best].priority) best = i;
    }
    const int from = groups_[best].members[rng_.index(groups_[best].members.size())];
    // A consumed guide path restarts from the point nearest the node being
    // extended, so expansion keeps chasing the leg instead of going random.
    // Groups whose last extension failed sample randomly instead (the path
    // may be unreachable); a later success re-arms the refill.
    if (groups_[best].pending.empty() && groups_[best].progressing &&
        groups_[best].mask != full_mask_ && !groups_[best].tour.order.empty()) {
      Group& grp = groups_[best];
      const auto path = map_.paths.find({grp.loc, grp.tour.order.front()});
      if (path != map_.paths.end() && !path->second.coords.empty()) {
        grp.pending = path->second.coords;
        const Vec2 pos = nodes_[static_cast<size_t>(from)].state.position();
        size_t closest = 0;
        double bd = distance(grp.pending[0], pos);
        for (size_t i = 1; i < grp.pending.size(); ++i) {
          const double d = distance(grp.pending[i], pos);
          if (d < bd) {
            bd = d;
            closest = i;
          }
        }
        grp.pending.erase(grp.pending.begin(), grp.pending.begin() + static_cast<long>(closest));
      }
    }
    const Vec2 target = select_target(scene_, groups_[best].pending, p_.target_vic,
                                      p_.target_retries, inflate_, rng_);

    PidSteer pid(model_, p_.dt);
    int cur = from;
    bool reached_target = false;
    int solution = -1;
    for (int step = 0; step < p_.extend_steps; ++step) {
      const TreeNode& cur_node = nodes_[static_cast<size_t>(cur)];
      const Action a = pid.control(cur_node.state, target);
      RobotState next = simulate(model_, cur_node.state, a, p_.dt);
      if (is_state_colliding(scene_, model_, next)) break;

      TreeNode node;
      node.state = std::move(next);
      node.parent = cur;
      node.action = a;
      node.mask = cur_node.mask;
      node.last_goal = cur_node.last_goal;
      const Vec2 pos = node.state.position();
      for (size_t g = 0; g < scene_.goals.size(); ++g) {
        const uint32_t bit = uint32_t{1} << g;
        if (!(node.mask & bit) && scene_.goals[g].contains(pos)) {
          node.mask |= bit;
          node.last_goal = static_cast<int>(g);
          node.new_goal = static_cast<int>(g);
          break;
        }
      }
      const int id = static_cast<int>(nodes_.size());
      nodes_.push_back(std::move(node));
      assign_group(id);

      if (nodes_[static_cast<size_t>(id)].mask == full_mask_) {
        solution = id;
        break;
      }
      cur = id;
      if (distance(pos, target) <= p_.target_radius) {
        reached_target = true;
        break;
      }
    }
    // groups_ may have grown (and reallocated) during the extension.
    Group& grp = groups_[best];
    grp.progressing = reached_target;
    grp.selections += 1;
    grp.priority = group_priority(grp.tour.cost, grp.selections, p_.alpha, p_.eps_cost);
    return solution;
  }

  void assign_group(int node_id) {
    TreeNode& node = nodes_[static_cast<size_t>(node_id)];
    const int anchor = map_.nearest_node(node.state.position(), p_.anchor_radius);
    const auto key = std::make_pair(node.mask, anchor);
    auto it = group_index_.find(key);
    if (it == group_index_.end()) {
      Group grp;
      grp.mask = node.mask;
      grp.anchor = anchor;
      grp.loc = node.last_goal;
      if (node.mask != full_mask_) {
        grp.tour = tour_for(node.mask, grp.loc);
        const int first = grp.tour.order.front();
        const auto path = map_.paths.find({grp.loc, first});
        if (path != map_.paths.end()) grp.pending = path->second.coords;
        // Skip guide coordinates behind the founding node.
        if (!grp.pending.empty()) {
          const Vec2 pos = node.state.position();
          size_t closest = 0;
          double best = distance(grp.pending[0], pos);
          for (size_t i = 1; i < grp.pending.size(); ++i) {
            const double d = distance(grp.pending[i], pos);
            if (d < best) {
              best = d;
              closest = i;
            }
          }
          grp.pending.erase(grp.pending.begin(),
                            grp.pending.begin() + static_cast<long>(closest));
        }
      }
      grp.priority = group_priority(grp.tour.cost, 0, p_.alpha, p_.eps_cost);
      const int id = static_cast<int>(groups_.size());
      groups_.push_back(std::move(grp));
      it = group_index_.emplace(key, id).first;
    }
    groups_[static_cast<size_t>(it->second)].members.push_back(node_id);
    node.group = it->second;
  }

  Tour tour_for(uint32_t mask, int loc) {
    const auto key = std::make_pair(mask, loc);
    const auto it = tour_cache_.find(key);
    if (it != tour_cache_.end()) return it->second;
    std::vector<int> remaining;
    for (size_t g = 0; g < scene_.goals.size(); ++g) {
      if (!(mask & (uint32_t{1} << g))) remaining.push_back(static_cast<int>(g));
    }
    const int origin = loc < 0 ? 0 : loc + 1;
    const Tour tour = static_cast<int>(remaining.size()) <= p_.exact_tour_limit
                          ? exact_tour(costs_, origin, remaining)
                          : greedy_tour(costs_, origin, remaining);
    tour_cache_.emplace(key, tour);
    return tour;
  }

  const Scene& scene_;
  const RobotModel& model_;
  const MotionMap& map_;
  const CostMatrix& costs_;
  PlannerParams p_;
  Rng rng_;
  double inflate_ = 0.0;
  uint32_t full_mask_ = 0;
  std::vector<TreeNode> nodes_;
  std::vector<Group> groups_;
  std::map<std::pair<uint32_t, int>, int> group_index_;
  std::map<std::pair<uint32_t, int>, Tour> tour_cache_;
};

MapParams map_params_from(const PlannerParams& p, const RobotModel& model) {
  MapParams mp;
  mp.r_vic = p.r_vic;
  mp.r_conn = p.r_conn;
  mp.vic_tries = p.vic_tries;
  mp.edge_step = p.edge_step;
  mp.inflate = model.circumradius();
  return mp;
}

}  // namespace

PlanResult plan_memory_guided(const Scene& scene, const RobotModel& model,
                              const RobotState& s_init, const MemoryStore& store,
                              const PlannerParams& params) {
  const EffortMeter start = effort();
  Rng rng(params.seed);

  MemoryQuery query = call_memory(store, scene, s_init.position(), params.guide_spacing);
  Rng map_rng = rng.fork(0x6d6170);
  const MotionMap map = generate_motion_map(scene, s_init.position(), query.paths,
                                            map_params_from(params, model), map_rng);

  // Tours use the distances the tree will actually traverse: graph path
  // costs where the map connected a leg, retrieved distances elsewhere.
  for (const auto& [key, path] : map.paths) {
    if (path.fallback) continue;
    const int row = key.first < 0 ? 0 : key.first + 1;
    query.costs.at(row, key.second + 1) = path.cost;
  }

  const double setup = (effort() - start).seconds();
  if (setup >= params.budget_s) {
    PlanResult res;
    res.planner = "memory";
    res.seed = params.seed;
    res.budget_s = params.budget_s;
    res.runtime_s = params.budget_s;
    res.status = PlanStatus::timeout;
    return res;
  }
  TreeSearch search(scene, model, s_init, map, query.costs, params,
                    rng.fork(0x74726565));
  return search.run("memory", setup);
}

namespace {

struct UnionFind {
  std::vector<int> parent;

  explicit UnionFind(size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[static_cast<size_t>(a)] != a) {
      parent[static_cast<size_t>(a)] = parent[static_cast<size_t>(parent[static_cast<size_t>(a)])];
      a = parent[static_cast<size_t>(a)];
    }
    return a;
  }
  void unite(int a, int b) { parent[static_cast<size_t>(find(a))] = find(b); }
};

/// Uniform-sampling roadmap grown in rounds until the start and every goal
/// share a component (or the node cap is hit).
MotionMap generate_uniform_map(const Scene& scene, Vec2 start,
                               const PlannerParams& p, double inflate, Rng& rng) {
  MotionMap map;
  const int n_goals = static_cast<int>(scene.goals.size());
  map.start_anchor = 0;
  map.nodes.push_back(start);
  for (const auto& g : scene.goals) {
    map.goal_anchors.push_back(static_cast<int>(map.nodes.size()));
    map.nodes.push_back(g.center);
  }
  map.adj.assign(map.nodes.size(), {});

  UnionFind uf(static_cast<size_t>(p.roadmap_cap) + map.nodes.size());
  size_t connected_from = 0;

  const auto connect_from = [&](size_t first_new) {
    map.build_index(p.r_conn);
    for (size_t i = first_new; i < map.nodes.size(); ++i) {
      const Vec2 pi = map.nodes[i];
      const auto [cx, cy] = std::pair{static_cast<int>(std::floor(pi.x / map.cell)),
                                      static_cast<int>(std::floor(pi.y / map.cell))};
      std::vector<int> cands;
      for (int dx = -1; dx <= 1; ++dx) {
        for (int dy = -1; dy <= 1; ++dy) {
          const auto it = map.grid.find({cx + dx, cy + dy});
          if (it == map.grid.end()) continue;
          for (int j : it->second) {
            if (j < static_cast<int>(i)) cands.push_back(j);
          }
        }
      }
      std::sort(cands.begin(), cands.end());
      for (int j : cands) {
        const double d = distance(pi, map.nodes[static_cast<size_t>(j)]);
        if (d > p.r_conn) continue;
        if (segment_colliding(scene, pi, map.nodes[static_cast<size_t>(j)], inflate,
                              p.edge_step)) {
          continue;
        }
        map.adj[i].push_back({j, d});
        map.adj[static_cast<size_t>(j)].push_back({static_cast<int>(i), d});
        uf.unite(static_cast<int>(i), j);
      }
    }
    connected_from = map.nodes.size();
  };

  const auto anchors_connected = [&]() {
    const int root = uf.find(map.start_anchor);
    for (int a : map.goal_anchors) {
      if (uf.find(a) != root) return false;
    }
    return true;
  };

  connect_from(0);
  while (!anchors_connected() && static_cast<int>(map.nodes.size()) < p.roadmap_cap) {
    const size_t first_new = map.nodes.size();
    for (int b = 0; b < p.roadmap_batch; ++b) {
      const Vec2 cand{rng.uniform(scene.bounds.xmin, scene.bounds.xmax),
                      rng.uniform(scene.bounds.ymin, scene.bounds.ymax)};
      if (!point_colliding(scene, cand, inflate)) map.nodes.push_back(cand);
    }
    map.adj.resize(map.nodes.size());
    connect_from(first_new);
  }
  (void)connected_from;

  const auto missing = shortest_paths(map, n_goals);
  for (const auto& key : missing) {
    // Straight-line fallback keeps the path table and cost matrix total.
    MapPath path;
    const Vec2 a = key.first < 0 ? start : scene.goals[static_cast<size_t>(key.first)].center;
    const Vec2 b = scene.goals[static_cast<size_t>(key.second)].center;
    path.coords = {a, b};
    path.cost = distance(a, b);
    path.fallback = true;
    map.paths[key] = path;
  }
  return map;
}

}  // namespace

PlanResult plan_baseline_roadmap(const Scene& scene, const RobotModel& model,
                                 const RobotState& s_init, const PlannerParams& params) {
  const EffortMeter start = effort();
  Rng rng(params.seed);

  Rng map_rng = rng.fork(0x726d6170);
  const MotionMap map = generate_uniform_map(scene, s_init.position(), params,
                                             model.circumradius(), map_rng);
  const int n = static_cast<int>(scene.goals.size());
  CostMatrix costs(n);
  for (int j = 0; j < n; ++j) costs.at(0, j + 1) = map.paths.at({-1, j}).cost;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) costs.at(i + 1, j + 1) = map.paths.at({i, j}).cost;
    }
  }

  const double setup = (effort() - start).seconds();
  if (setup >= params.budget_s) {
    PlanResult res;
    res.planner = "dromos";
    res.seed = params.seed;
    res.budget_s = params.budget_s;
    res.runtime_s = params.budget_s;
    res.status = PlanStatus::timeout;
    return res;
  }
  TreeSearch search(scene, model, s_init, map, costs, params, rng.fork(0x74726565));
  return search.run("dromos", setup);
}

PlanResult plan_sequential_rrt(const Scene& scene, const RobotModel& model,
                               const RobotState& s_init, const PlannerParams& params) {
  const EffortMeter start = effort();
  Rng rng(params.seed);
  const double inflate = model.circumradius();

  PlanResult res;
  res.planner = "seqrrt";
  res.seed = params.seed;
  res.budget_s = params.budget_s;
  res.trajectory.dt = params.dt;
  res.trajectory.states.push_back(s_init);

  uint32_t mask = 0;
  const uint32_t full = (uint32_t{1} << scene.goals.size()) - 1;
  RobotState state = s_init;
  for (size_t g = 0; g < scene.goals.size(); ++g) {
    if (scene.goals[g].contains(state.position())) {
      mask |= uint32_t{1} << g;
      res.goal_order.push_back(static_cast<int>(g));
    }
  }

  size_t total_nodes = 1;
  bool out_of_budget = false;
  while (mask != full && !out_of_budget) {
    // Euclidean-nearest unvisited goal; ties go to the lowest index.
    int goal = -1;
    double best = std::numeric_limits<double>::infinity();
    for (size_t g = 0; g < scene.goals.size(); ++g) {
      if (mask & (uint32_t{1} << g)) continue;
      const double d = distance(state.position(), scene.goals[g].center);
      if (d < best) {
        best = d;
        goal = static_cast<int>(g);
      }
    }
    const GoalRegion& region = scene.goals[static_cast<size_t>(goal)];

    struct LegNode {
      RobotState state;
      int parent;
      Action action;
    };
    std::vector<LegNode> leg{{state, -1, Action{}}};
    PointGrid index(2.5);
    index.insert(0, state.position());
    int reached = -1;
    while (reached < 0) {
      if ((effort() - start).seconds() >= params.budget_s ||
          total_nodes + leg.size() >= params.max_nodes) {
        out_of_budget = true;
        break;
      }
      const Vec2 target = rng.chance(params.rrt_goal_bias)
                              ? region.center
                              : random_free_point(scene, inflate, rng);
      PidSteer pid(model, params.dt);
      int cur = index.nearest(target);
      for (int step = 0; step < params.rrt_extend_steps; ++step) {
        const Action a = pid.control(leg[static_cast<size_t>(cur)].state, target);
        RobotState next = simulate(model, leg[static_cast<size_t>(cur)].state, a, params.dt);
        if (is_state_colliding(scene, model, next)) break;
        leg.push_back({std::move(next), cur, a});
        cur = static_cast<int>(leg.size()) - 1;
        index.insert(cur, leg.back().state.position());
        const Vec2 pos = leg.back().state.position();
        if (region.contains(pos)) {
          reached = cur;
          break;
        }
        if (distance(pos, target) <= params.target_radius) break;
      }
    }
    total_nodes += leg.size() - 1;
    if (reached < 0) break;

    std::vector<int> chain;
    for (int cur = reached; cur > 0; cur = leg[static_cast<size_t>(cur)].parent) {
      chain.push_back(cur);
    }
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      res.trajectory.actions.push_back(leg[static_cast<size_t>(*it)].action);
      res.trajectory.states.push_back(leg[static_cast<size_t>(*it)].state);
    }
    state = leg[static_cast<size_t>(reached)].state;
    mask |= uint32_t{1} << goal;
    res.goal_order.push_back(goal);
  }

  res.runtime_s = std::min((effort() - start).seconds(), params.budget_s);
  res.tree_nodes = total_nodes;
  if (mask == full && (effort() - start).seconds() <= params.budget_s) {
    res.status = PlanStatus::solved;
    res.distance_m = res.trajectory.length();
  } else {
    res.status = PlanStatus::timeout;
    res.goal_order.clear();
  }
  return res;
}

std::string result_to_json(const PlanResult& result, const Scene& scene,
                           const RobotModel& model) {
  json j;
  j["planner"] = result.planner;
  j["scene_id"] = scene.id;
  j["robot"] = to_string(model.kind);
  j["seed"] = result.seed;
  j["budget_s"] = result.budget_s;
  j["status"] = result.status == PlanStatus::solved ? "solved" : "timeout";
  j["runtime_s"] = result.runtime_s;
  j["distance_m"] = result.distance_m;
  j["tree_nodes"] = result.tree_nodes;
  j["goal_order"] = result.goal_order;
  j["dt"] = result.trajectory.dt;
  if (!result.trajectory.states.empty()) {
    const RobotState& s0 = result.trajectory.states.front();
    json init;
    init["x"] = s0.x;
    init["y"] = s0.y;
    init["theta"] = s0.theta;
    init["psi"] = s0.psi;
    init["v"] = s0.v;
    init["trailer"] = s0.trailer;
    j["init_state"] = init;
  }
  json actions = json::array();
  for (const auto& a : result.trajectory.actions) {
    actions.push_back({a.acc, a.omega});
  }
  j["actions"] = actions;
  return j.dump(2) + "\n";
}

RobotState instance_start(const Scene& scene, const RobotModel& model, uint64_t seed) {
  Rng rng = Rng(seed).fork(0x737461727400ULL);
  RobotState s;
  const size_t g = rng.index(scene.goals.size());
  s.x = scene.goals[g].center.x;
  s.y = scene.goals[g].center.y;
  s.theta = rng.uniform(-kPi, kPi);
  if (model.kind == RobotModel::Kind::snake) {
    s.trailer.assign(static_cast<size_t>(model.trailers), s.theta);
  }
  return s;
}

bool visits_in_order(const Scene& scene, const Trajectory& traj,
                     const std::vector<int>& order) {
  size_t cursor = 0;
  for (int g : order) {
    if (g < 0 || g >= static_cast<int>(scene.goals.size())) return false;
    const GoalRegion& region = scene.goals[static_cast<size_t>(g)];
    bool found = false;
    while (cursor < traj.states.size()) {
      if (region.contains(traj.states[cursor].position())) {
        found = true;
        ++cursor;
        break;
      }
      ++cursor;
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace mgmm
