#include "mgmm/world.hpp"

#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "mgmm/effort.hpp"

namespace mgmm {

using json = nlohmann::json;

namespace {

constexpr double kWorldSide = 30.0;
constexpr double kGoalRadius = 0.5;
constexpr double kGoalClearance = 0.75;  // obstacle to goal-disc boundary

Aabb world_bounds() { return {0.0, 0.0, kWorldSide, kWorldSide}; }

bool obstacle_clear_of_goals(const Obstacle& o, const std::vector<GoalRegion>& goals,
                             double clearance) {
  for (const auto& g : goals) {
    if (point_aabb_distance(g.center, o.aabb()) < g.radius + clearance) return false;
  }
  return true;
}

}  // namespace

SceneClass scene_class_from_string(const std::string& s) {
  if (s == "random") return SceneClass::random;
  if (s == "curve") return SceneClass::curve;
  if (s == "maze") return SceneClass::maze;
  if (s == "storage") return SceneClass::storage;
  throw std::invalid_argument("unknown scene class: " + s);
}

std::string to_string(SceneClass c) {
  switch (c) {
    case SceneClass::random: return "random";
    case SceneClass::curve: return "curve";
    case SceneClass::maze: return "maze";
    case SceneClass::storage: return "storage";
  }
  return "?";
}

GoalLayout layout_from_string(const std::string& s) {
  if (s == "2x2") return GoalLayout::grid2x2;
  if (s == "3x3") return GoalLayout::grid3x3;
  if (s == "4x4") return GoalLayout::grid4x4;
  throw std::invalid_argument("unknown goal layout: " + s);
}

std::string to_string(GoalLayout l) {
  switch (l) {
    case GoalLayout::grid2x2: return "2x2";
    case GoalLayout::grid3x3: return "3x3";
    case GoalLayout::grid4x4: return "4x4";
  }
  return "?";
}

int goals_per_side(GoalLayout l) {
  switch (l) {
    case GoalLayout::grid2x2: return 2;
    case GoalLayout::grid3x3: return 3;
    case GoalLayout::grid4x4: return 4;
  }
  return 0;
}

std::vector<GoalRegion> layout_goals(GoalLayout l) {
  const int m = goals_per_side(l);
  std::vector<GoalRegion> goals;
  goals.reserve(static_cast<size_t>(m) * m);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      const double x = kWorldSide * (c + 1) / (m + 1);
      const double y = kWorldSide * (r + 1) / (m + 1);
      goals.push_back(GoalRegion{{x, y}, kGoalRadius});
    }
  }
  return goals;
}

// ---- collision checking -------------------------------------------------

bool point_colliding(const Scene& scene, Vec2 p, double inflate) {
  const Aabb safe = scene.bounds.shrunk(inflate);
  if (!(p.x >= safe.xmin && p.x <= safe.xmax && p.y >= safe.ymin && p.y <= safe.ymax)) {
    return true;
  }
  auto& m = effort();
  for (const auto& o : scene.obstacles) {
    ++m.rect_tests;
    if (point_aabb_distance(p, o.aabb()) <= inflate) return true;
  }
  return false;
}

bool segment_colliding(const Scene& scene, Vec2 a, Vec2 b, double inflate,
                       double step) {
  const double len = distance(a, b);
  const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    if (point_colliding(scene, a + (b - a) * t, inflate)) return true;
  }
  return false;
}

namespace {

bool car_colliding(const Scene& scene, const RobotModel& robot, const RobotState& s) {
  const Obb body{{s.x, s.y}, s.theta, robot.body_half_len(), robot.body_half_wid()};
  for (const Vec2& c : body.corners()) {
    if (!scene.bounds.contains(c)) return true;
  }
  auto& m = effort();
  for (const auto& o : scene.obstacles) {
    ++m.rect_tests;
    if (obb_intersects_aabb(body, o.aabb())) return true;
  }
  return false;
}

bool snake_colliding(const Scene& scene, const RobotModel& robot, const RobotState& s) {
  const auto joints = snake_joints(robot, s);
  const double r = robot.cap_radius;
  const Aabb safe = scene.bounds.shrunk(r);
  for (const Vec2& j : joints) {
    if (!safe.contains(j)) return true;
  }
  auto& m = effort();
  for (const auto& o : scene.obstacles) {
    const Aabb box = o.aabb();
    for (size_t i = 1; i < joints.size(); ++i) {
      ++m.capsule_tests;
      if (segment_aabb_distance(joints[i - 1], joints[i], box) <= r) return true;
    }
  }
  return false;
}

}  // namespace

bool is_state_colliding(const Scene& scene, const RobotModel& robot,
                        const RobotState& s) {
  return robot.kind == RobotModel::Kind::car ? car_colliding(scene, robot, s)
                                             : snake_colliding(scene, robot, s);
}

bool trajectory_collision_free(const Scene& scene, const RobotModel& robot,
                               const Trajectory& traj) {
  for (const auto& s : traj.states) {
    if (is_state_colliding(scene, robot, s)) return false;
  }
  return true;
}

// ---- rasterization & connectivity ---------------------------------------

OccupancyGrid rasterize(const Scene& scene, int resolution) {
  OccupancyGrid g;
  g.resolution = resolution;
  g.cells.assign(static_cast<size_t>(resolution) * resolution, 0);
  const double dx = scene.bounds.width() / resolution;
  const double dy = scene.bounds.height() / resolution;
  for (const auto& o : scene.obstacles) {
    const Aabb box = o.aabb();
    // Only cells the obstacle can actually overlap.
    int c0 = std::max(0, static_cast<int>(std::floor((box.xmin - scene.bounds.xmin) / dx)));
    int c1 = std::min(resolution - 1, static_cast<int>(std::floor((box.xmax - scene.bounds.xmin) / dx)));
    int r0 = std::max(0, static_cast<int>(std::floor((box.ymin - scene.bounds.ymin) / dy)));
    int r1 = std::min(resolution - 1, static_cast<int>(std::floor((box.ymax - scene.bounds.ymin) / dy)));
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        const Aabb cell{scene.bounds.xmin + c * dx, scene.bounds.ymin + r * dy,
                        scene.bounds.xmin + (c + 1) * dx, scene.bounds.ymin + (r + 1) * dy};
        if (cell.overlaps_open(box)) g.at(r, c) = 1;
      }
    }
  }
  return g;
}

bool goals_grid_connected(const Scene& scene, int resolution, double inflate) {
  std::vector<uint8_t> free_cells(static_cast<size_t>(resolution) * resolution, 0);
  const double dx = scene.bounds.width() / resolution;
  const double dy = scene.bounds.height() / resolution;
  if (inflate > 0.0) {
    for (int r = 0; r < resolution; ++r) {
      for (int c = 0; c < resolution; ++c) {
        const Vec2 p{scene.bounds.xmin + (c + 0.5) * dx, scene.bounds.ymin + (r + 0.5) * dy};
        free_cells[static_cast<size_t>(r) * resolution + c] =
            point_colliding(scene, p, inflate) ? 0 : 1;
      }
    }
  } else {
    const OccupancyGrid g = rasterize(scene, resolution);
    for (size_t i = 0; i < g.cells.size(); ++i) free_cells[i] = g.cells[i] ? 0 : 1;
  }

  // One free seed cell per goal.
  std::vector<int> seeds;
  for (const auto& goal : scene.goals) {
    int found = -1;
    double best = 1e18;
    for (int r = 0; r < resolution && found < 0; ++r) {
      for (int c = 0; c < resolution; ++c) {
        if (!free_cells[static_cast<size_t>(r) * resolution + c]) continue;
        const Vec2 p{scene.bounds.xmin + (c + 0.5) * dx, scene.bounds.ymin + (r + 0.5) * dy};
        const double d = distance(p, goal.center);
        if (d <= goal.radius && d < best) {
          best = d;
          found = r * resolution + c;
        }
      }
    }
    if (found < 0) return false;
    seeds.push_back(found);
  }

  std::vector<uint8_t> seen(free_cells.size(), 0);
  std::deque<int> queue{seeds[0]};
  seen[static_cast<size_t>(seeds[0])] = 1;
  while (!queue.empty()) {
    const int cur = queue.front();
    queue.pop_front();
    const int r = cur / resolution, c = cur % resolution;
    const int dr[] = {1, -1, 0, 0};
    const int dc[] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int nr = r + dr[k], nc = c + dc[k];
      if (nr < 0 || nr >= resolution || nc < 0 || nc >= resolution) continue;
      const size_t idx = static_cast<size_t>(nr) * resolution + nc;
      if (free_cells[idx] && !seen[idx]) {
        seen[idx] = 1;
        queue.push_back(static_cast<int>(idx));
      }
    }
  }
  for (int s : seeds) {
    if (!seen[static_cast<size_t>(s)]) return false;
  }
  return true;
}

// ---- generation ----------------------------------------------------------

std::vector<Obstacle> place_uniform_obstacles(const Aabb& bounds,
                                              const std::vector<GoalRegion>& goals,
                                              int count, double hmin, double hmax,
                                              double clearance, Rng& rng, int tries) {
  std::vector<Obstacle> out;
  out.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    bool placed = false;
    for (int t = 0; t < tries; ++t) {
      Obstacle o;
      o.hw = rng.uniform(hmin, hmax);
      o.hh = rng.uniform(hmin, hmax);
      o.center.x = rng.uniform(bounds.xmin + o.hw, bounds.xmax - o.hw);
      o.center.y = rng.uniform(bounds.ymin + o.hh, bounds.ymax - o.hh);
      if (!obstacle_clear_of_goals(o, goals, clearance)) continue;
      out.push_back(o);
      placed = true;
      break;
    }
    if (!placed) {
      throw std::runtime_error("obstacle placement failed after retries; "
                               "parameters overcrowd the workspace");
    }
  }
  return out;
}

namespace {

std::vector<Obstacle> build_random(const std::vector<GoalRegion>& goals, Rng& rng) {
  return place_uniform_obstacles(world_bounds(), goals, 40, 0.4, 1.25,
                                 kGoalClearance, rng);
}

// Splits [lo, hi] into kept segments, removing the open door/goal intervals.
std::vector<std::pair<double, double>> cut_intervals(
    double lo, double hi, std::vector<std::pair<double, double>> holes) {
  std::sort(holes.begin(), holes.end());
  std::vector<std::pair<double, double>> kept;
  double cur = lo;
  for (auto [a, b] : holes) {
    a = std::max(a, lo);
    b = std::min(b, hi);
    if (b <= cur) continue;
    if (a > cur) kept.emplace_back(cur, a);
    cur = std::max(cur, b);
  }
  if (cur < hi) kept.emplace_back(cur, hi);
  return kept;
}

void add_wall(std::vector<Obstacle>& out, bool vertical, double coord, double lo,
              double hi, double half_thick, const std::vector<GoalRegion>& goals,
              const std::vector<std::pair<double, double>>& doors) {
  std::vector<std::pair<double, double>> holes = doors;
  for (const auto& g : goals) {
    const double axis = vertical ? g.center.x : g.center.y;
    const double along = vertical ? g.center.y : g.center.x;
    if (std::fabs(axis - coord) < half_thick + g.radius + kGoalClearance) {
      holes.emplace_back(along - 1.9, along + 1.9);
    }
  }
  for (auto [a, b] : cut_intervals(lo, hi, holes)) {
    if (b - a < 0.5) continue;
    Obstacle o;
    if (vertical) {
      o.center = {coord, 0.5 * (a + b)};
      o.hw = half_thick;
      o.hh = 0.5 * (b - a);
    } else {
      o.center = {0.5 * (a + b), coord};
      o.hw = 0.5 * (b - a);
      o.hh = half_thick;
    }
    out.push_back(o);
  }
}

std::vector<Obstacle> build_maze(const std::vector<GoalRegion>& goals, Rng& rng) {
  std::vector<Obstacle> out;
  constexpr double kHalfThick = 0.3;
  constexpr double kDoor = 2.2;
  constexpr double kMinSide = 5.0;

  // Wall coordinates keep clear of the fixed goal rows/columns so walls do
  // not need extra gaps carved around goal discs.
  const auto pick_coord = [&](double lo, double hi, bool vertical) {
    for (int t = 0; t < 30; ++t) {
      const double c = rng.uniform(lo, hi);
      bool clear = true;
      for (const auto& g : goals) {
        const double axis = vertical ? g.center.x : g.center.y;
        if (std::fabs(axis - c) < kHalfThick + g.radius + kGoalClearance + 0.2) {
          clear = false;
          break;
        }
      }
      if (clear) return c;
    }
    return -1.0;
  };

  struct Region {
    double xmin, ymin, xmax, ymax;
  };
  std::deque<Region> stack{{1.2, 1.2, kWorldSide - 1.2, kWorldSide - 1.2}};
  while (!stack.empty()) {
    const Region reg = stack.front();
    stack.pop_front();
    const double w = reg.xmax - reg.xmin, h = reg.ymax - reg.ymin;
    const bool vertical = w >= h;
    const double span = vertical ? w : h;
    if (span < 2.0 * kMinSide) continue;

    const double lo = vertical ? reg.xmin : reg.ymin;
    const double coord = pick_coord(lo + kMinSide, lo + span - kMinSide, vertical);
    if (coord < 0.0) continue;
    const double a0 = vertical ? reg.ymin : reg.xmin;
    const double a1 = vertical ? reg.ymax : reg.xmax;
    std::vector<std::pair<double, double>> doors;
    const int n_doors = 1 + (rng.chance(0.2) ? 1 : 0);
    for (int d = 0; d < n_doors; ++d) {
      const double dc = rng.uniform(a0 + kDoor, a1 - kDoor);
      doors.emplace_back(dc - 0.5 * kDoor, dc + 0.5 * kDoor);
    }
    add_wall(out, vertical, coord, a0, a1, kHalfThick, goals, doors);
    if (vertical) {
      stack.push_back({reg.xmin, reg.ymin, coord - kHalfThick, reg.ymax});
      stack.push_back({coord + kHalfThick, reg.ymin, reg.xmax, reg.ymax});
    } else {
      stack.push_back({reg.xmin, reg.ymin, reg.xmax, coord - kHalfThick});
      stack.push_back({reg.xmin, coord + kHalfThick, reg.xmax, reg.ymax});
    }
  }
  return out;
}

std::vector<Obstacle> build_curve(const std::vector<GoalRegion>& goals,
                                  GoalLayout layout, Rng& rng) {
  std::vector<Obstacle> out;
  const int m = goals_per_side(layout);
  const double row_gap = kWorldSide / (m + 1);
  const double amp_max = 0.5 * row_gap - 1.9;
  for (int band = 0; band < m - 1; ++band) {
    const double y_mid = kWorldSide * (band + 1.5) / (m + 1);
    const double amp = rng.uniform(std::min(1.0, amp_max), amp_max);
    const double dir = rng.chance(0.5) ? 1.0 : -1.0;
    std::vector<double> door_x;
    const int n_doors = 2;
    for (int d = 0; d < n_doors; ++d) door_x.push_back(rng.uniform(4.0, kWorldSide - 4.0));
    const int n_pts = 27;
    for (int i = 0; i < n_pts; ++i) {
      const double t = static_cast<double>(i) / (n_pts - 1);
      const double x = 2.0 + (kWorldSide - 4.0) * t;
      bool in_door = false;
      for (double dx : door_x) {
        if (std::fabs(x - dx) < 1.4) in_door = true;
      }
      if (in_door) continue;
      Obstacle o{{x, y_mid + dir * amp * std::sin(kPi * t)}, 0.42, 0.42};
      if (obstacle_clear_of_goals(o, goals, kGoalClearance)) out.push_back(o);
    }
  }
  // A little extra clutter away from the arcs.
  auto clutter = place_uniform_obstacles(world_bounds(), goals, 8, 0.35, 0.8,
                                         kGoalClearance, rng);
  out.insert(out.end(), clutter.begin(), clutter.end());
  return out;
}

std::vector<Obstacle> build_storage(const std::vector<GoalRegion>& goals,
                                    GoalLayout layout, Rng& rng) {
  std::vector<Obstacle> out;
  const int m = goals_per_side(layout);
  // Shelf bands midway between consecutive goal rows and between the outer
  // rows and the walls.
  std::vector<double> rows{0.0};
  for (int r = 0; r < m; ++r) rows.push_back(kWorldSide * (r + 1) / (m + 1));
  rows.push_back(kWorldSide);
  constexpr double kShelfHalfLen = 2.0;
  constexpr double kShelfHalfWid = 0.35;
  constexpr double kAisle = 2.6;
  for (size_t b = 0; b + 1 < rows.size(); ++b) {
    const double y = 0.5 * (rows[b] + rows[b + 1]);
    double x = rng.uniform(1.2, 2.8) + kShelfHalfLen;
    const size_t skip = rng.index(4);
    size_t idx = 0;
    while (x + kShelfHalfLen < kWorldSide - 1.0) {
      if (idx != skip) {
        Obstacle o{{x, y}, kShelfHalfLen, kShelfHalfWid};
        if (obstacle_clear_of_goals(o, goals, kGoalClearance)) out.push_back(o);
      }
      x += 2.0 * kShelfHalfLen + kAisle;
      ++idx;
    }
  }
  return out;
}

}  // namespace

Scene generate_scene(SceneClass cls, GoalLayout layout, uint64_t seed) {
  const auto goals = layout_goals(layout);
  for (int attempt = 0; attempt < 24; ++attempt) {
    Rng rng = Rng(seed).fork(0x5ce4e5 + static_cast<uint64_t>(attempt));
    Scene scene;
    scene.bounds = world_bounds();
    scene.goals = goals;
    switch (cls) {
      case SceneClass::random: scene.obstacles = build_random(goals, rng); break;
      case SceneClass::curve: scene.obstacles = build_curve(goals, layout, rng); break;
      case SceneClass::maze: scene.obstacles = build_maze(goals, rng); break;
      case SceneClass::storage: scene.obstacles = build_storage(goals, layout, rng); break;
    }
    std::ostringstream id;
    id << to_string(cls) << "-" << to_string(layout) << "-s" << seed;
    scene.id = id.str();
    if (goals_grid_connected(scene, 64) && goals_grid_connected(scene, 64, 0.7)) {
      return scene;
    }
  }
  throw std::runtime_error("scene generation failed: no grid-connected layout "
                           "after bounded retries");
}

// ---- scene file format ----------------------------------------------------

std::string scene_to_json(const Scene& scene) {
  json j;
  j["bounds"] = {scene.bounds.xmin, scene.bounds.ymin, scene.bounds.xmax,
                 scene.bounds.ymax};
  json obs = json::array();
  for (const auto& o : scene.obstacles) {
    obs.push_back({o.center.x, o.center.y, o.hw, o.hh});
  }
  j["obstacles"] = obs;
  json gs = json::array();
  for (const auto& g : scene.goals) {
    gs.push_back({g.center.x, g.center.y, g.radius});
  }
  j["goals"] = gs;
  j["id"] = scene.id;
  return j.dump(2) + "\n";
}

Scene scene_from_json(const std::string& text) {
  const json j = json::parse(text);
  Scene scene;
  const auto& b = j.at("bounds");
  scene.bounds = {b.at(0).get<double>(), b.at(1).get<double>(),
                  b.at(2).get<double>(), b.at(3).get<double>()};
  for (const auto& o : j.at("obstacles")) {
    scene.obstacles.push_back(Obstacle{{o.at(0).get<double>(), o.at(1).get<double>()},
                                       o.at(2).get<double>(), o.at(3).get<double>()});
  }
  for (const auto& g : j.at("goals")) {
    scene.goals.push_back(GoalRegion{{g.at(0).get<double>(), g.at(1).get<double>()},
                                     g.at(2).get<double>()});
  }
  scene.id = j.value("id", "");
  return scene;
}

void save_scene(const Scene& scene, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write scene file: " + path);
  f << scene_to_json(scene);
}

Scene load_scene(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read scene file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return scene_from_json(ss.str());
}

}  // namespace mgmm
