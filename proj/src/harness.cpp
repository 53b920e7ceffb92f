#include "mgmm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

namespace mgmm {

using json = nlohmann::json;

double trimmed_mean(std::vector<double> values, double fraction) {
  if (values.empty()) throw std::invalid_argument("trimmed_mean: empty sample");
  if (fraction < 0.0 || fraction >= 0.5) {
    throw std::invalid_argument("trimmed_mean: fraction must lie in [0, 0.5)");
  }
  std::sort(values.begin(), values.end());
  const size_t drop = static_cast<size_t>(std::floor(fraction * static_cast<double>(values.size())));
  if (2 * drop >= values.size()) {
    throw std::invalid_argument("trimmed_mean: nothing left after trimming");
  }
  double sum = 0.0;
  for (size_t i = drop; i < values.size() - drop; ++i) sum += values[i];
  return sum / static_cast<double>(values.size() - 2 * drop);
}

// ---- experience planning ---------------------------------------------------

namespace {

/// 8-connected A* over inflated free cells; returns cell-center waypoints.
std::optional<std::vector<Vec2>> grid_path(const Scene& scene, Vec2 from, Vec2 to,
                                           double inflate, int res = 64) {
  const double dx = scene.bounds.width() / res;
  const double dy = scene.bounds.height() / res;
  std::vector<uint8_t> free_cells(static_cast<size_t>(res) * res, 0);
  for (int r = 0; r < res; ++r) {
    for (int c = 0; c < res; ++c) {
      const Vec2 p{scene.bounds.xmin + (c + 0.5) * dx, scene.bounds.ymin + (r + 0.5) * dy};
      free_cells[static_cast<size_t>(r) * res + c] = point_colliding(scene, p, inflate) ? 0 : 1;
    }
  }
  const auto cell_of = [&](Vec2 p) {
    const int c = std::clamp(static_cast<int>((p.x - scene.bounds.xmin) / dx), 0, res - 1);
    const int r = std::clamp(static_cast<int>((p.y - scene.bounds.ymin) / dy), 0, res - 1);
    return r * res + c;
  };
  const auto center_of = [&](int idx) {
    return Vec2{scene.bounds.xmin + (idx % res + 0.5) * dx,
                scene.bounds.ymin + (idx / res + 0.5) * dy};
  };

  int start = cell_of(from), goal = cell_of(to);
  // Fall back to the nearest free cell when an endpoint cell is blocked.
  for (int* endpoint : {&start, &goal}) {
    if (free_cells[static_cast<size_t>(*endpoint)]) continue;
    const Vec2 want = *endpoint == start ? from : to;
    double best = std::numeric_limits<double>::infinity();
    int pick = -1;
    for (int i = 0; i < res * res; ++i) {
      if (!free_cells[static_cast<size_t>(i)]) continue;
      const double d = distance(center_of(i), want);
      if (d < best) {
        best = d;
        pick = i;
      }
    }
    if (pick < 0 || best > 1.5) return std::nullopt;
    *endpoint = pick;
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(free_cells.size(), kInf);
  std::vector<int> parent(free_cells.size(), -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  const auto heuristic = [&](int idx) { return distance(center_of(idx), center_of(goal)); };
  dist[static_cast<size_t>(start)] = 0.0;
  heap.emplace(heuristic(start), start);
  while (!heap.empty()) {
    const auto [f, u] = heap.top();
    heap.pop();
    if (u == goal) break;
    if (f > dist[static_cast<size_t>(u)] + heuristic(u) + 1e-12) continue;
    const int r = u / res, c = u % res;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const int nr = r + dr, nc = c + dc;
        if (nr < 0 || nr >= res || nc < 0 || nc >= res) continue;
        const int v = nr * res + nc;
        if (!free_cells[static_cast<size_t>(v)]) continue;
        if (dr != 0 && dc != 0) {
          // No corner cutting through blocked orthogonal neighbors.
          if (!free_cells[static_cast<size_t>(r * res + nc)] ||
              !free_cells[static_cast<size_t>(nr * res + c)]) {
            continue;
          }
        }
        const double step = (dr != 0 && dc != 0) ? std::hypot(dx, dy)
                                                 : (dr != 0 ? dy : dx);
        const double nd = dist[static_cast<size_t>(u)] + step;
        if (nd < dist[static_cast<size_t>(v)]) {
          dist[static_cast<size_t>(v)] = nd;
          parent[static_cast<size_t>(v)] = u;
          heap.emplace(nd + heuristic(v), v);
        }
      }
    }
  }
  if (dist[static_cast<size_t>(goal)] == kInf) return std::nullopt;

  std::vector<Vec2> rev;
  for (int cur = goal; cur >= 0; cur = parent[static_cast<size_t>(cur)]) {
    rev.push_back(center_of(cur));
  }
  std::vector<Vec2> path(rev.rbegin(), rev.rend());
  path.front() = from;
  path.back() = to;

  // Greedy line-of-sight shortcutting.
  std::vector<Vec2> out{path.front()};
  size_t i = 0;
  while (i + 1 < path.size()) {
    size_t j = path.size() - 1;
    while (j > i + 1 && segment_colliding(scene, path[i], path[j], inflate)) --j;
    out.push_back(path[j]);
    i = j;
  }
  return out;
}

}  // namespace

std::optional<Trajectory> plan_pair_experience(const Scene& scene,
                                               const RobotModel& model, int from_goal,
                                               int to_goal, double dt) {
  const GoalRegion& from = scene.goals[static_cast<size_t>(from_goal)];
  const GoalRegion& to = scene.goals[static_cast<size_t>(to_goal)];
  const double inflate = model.circumradius() + 0.2;

  auto waypoints = grid_path(scene, from.center, to.center, inflate);
  if (!waypoints) waypoints = grid_path(scene, from.center, to.center, model.circumradius());
  if (!waypoints || waypoints->size() < 2) return std::nullopt;

  RobotState s;
  s.x = from.center.x;
  s.y = from.center.y;
  s.theta = std::atan2((*waypoints)[1].y - from.center.y, (*waypoints)[1].x - from.center.x);
  if (model.kind == RobotModel::Kind::snake) {
    s.trailer.assign(static_cast<size_t>(model.trailers), s.theta);
  }
  if (is_state_colliding(scene, model, s)) return std::nullopt;

  Trajectory traj;
  traj.dt = dt;
  traj.states.push_back(s);

  PidSteer pid(model, dt);
  size_t wp = 1;
  const int step_cap = 4000;
  for (int step = 0; step < step_cap; ++step) {
    const bool last = wp + 1 == waypoints->size();
    const Vec2 target = (*waypoints)[wp];
    const double advance_radius = last ? 0.35 : 0.9;

    const Action a = pid.control(traj.states.back(), target);
    RobotState next = simulate(model, traj.states.back(), a, dt);
    if (is_state_colliding(scene, model, next)) return std::nullopt;
    traj.actions.push_back(a);
    traj.states.push_back(std::move(next));

    const Vec2 pos = traj.states.back().position();
    if (last && to.contains(pos)) return traj;
    if (!last && distance(pos, target) <= advance_radius) ++wp;
  }
  return std::nullopt;
}

// ---- store training ----------------------------------------------------------

TrainedStore train_store(const std::vector<Scene>& originals, SceneClass cls,
                         GoalLayout layout, const RobotModel& model,
                         const ExperienceConfig& cfg) {
  TrainedStore out;
  out.store.grid_resolution = cfg.grid_resolution;
  out.store.layout = to_string(layout);
  out.store.scene_class = to_string(cls);
  out.store.robot = to_string(model.kind);
  const int n = goals_per_side(layout) * goals_per_side(layout);
  out.store.n_goals = n;

  if (static_cast<int>(originals.size()) < cfg.originals) {
    throw std::invalid_argument("train_store: not enough original scenes");
  }

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      Rng pair_rng = Rng(cfg.seed).fork(0x70 + static_cast<uint64_t>(i) * 64 +
                                        static_cast<uint64_t>(j));
      PairExperience exp;
      for (int o = 0; o < cfg.originals; ++o) {
        const Scene& scene = originals[static_cast<size_t>(o)];
        auto plan = plan_pair_experience(scene, model, i, j);
        if (!plan) {
          ++out.skipped_plans;
          continue;
        }
        Rng aug_rng = pair_rng.fork(static_cast<uint64_t>(o));
        auto scenes = augment(scene, model, *plan, cfg.augmentations, cfg.augment, aug_rng);

        PairExperience::Cluster cluster;
        cluster.plan = std::move(*plan);
        cluster.grids.push_back(rasterize(scene, cfg.grid_resolution));
        const int held = static_cast<int>(std::floor(cfg.holdout * static_cast<double>(scenes.size())));
        const int kept = static_cast<int>(scenes.size()) - held;
        for (int k = 0; k < kept; ++k) {
          cluster.grids.push_back(rasterize(scenes[static_cast<size_t>(k)], cfg.grid_resolution));
        }
        const int cluster_id = static_cast<int>(exp.clusters.size());
        for (int k = kept; k < static_cast<int>(scenes.size()); ++k) {
          HoldoutSample h;
          h.pair = {i, j};
          h.cluster = cluster_id;
          h.grid = rasterize(scenes[static_cast<size_t>(k)], cfg.grid_resolution);
          h.scene = std::move(scenes[static_cast<size_t>(k)]);
          out.holdout.push_back(std::move(h));
        }
        exp.clusters.push_back(std::move(cluster));
      }
      TrainConfig tc = cfg.train;
      tc.seed = Rng(cfg.seed).fork(0x656e63).next_u64() ^
                (static_cast<uint64_t>(i) * 131 + static_cast<uint64_t>(j));
      out.store.pairs.emplace(std::make_pair(i, j),
                              build_pair_memory(exp, cfg.grid_resolution, tc));
    }
  }
  return out;
}

// ---- benchmarking ------------------------------------------------------------

void BenchmarkConfig::validate() const {
  if (trim < 0.0 || trim >= 0.5) {
    throw std::invalid_argument("benchmark config: trim fraction must lie in [0, 0.5)");
  }
  if (instances < 4) {
    throw std::invalid_argument("benchmark config: need at least 4 instances");
  }
}

namespace {

std::string cell_key(SceneClass cls, GoalLayout layout) {
  return to_string(cls) + "/" + to_string(layout);
}

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

struct Task {
  SceneClass cls;
  GoalLayout layout;
  std::string planner;
  int instance_id;
  uint64_t seed;
  const MemoryStore* store;  // null unless planner == memory
};

InstanceRow run_task(const Task& task, const BenchmarkConfig& cfg) {
  InstanceRow row;
  row.scene_class = to_string(task.cls);
  row.layout = to_string(task.layout);
  row.planner = task.planner;
  row.instance_id = task.instance_id;
  row.seed = task.seed;
  row.distance_m = nan_value();

  const Scene scene = generate_scene(task.cls, task.layout, task.seed);
  const RobotState start = instance_start(scene, cfg.robot, task.seed);
  PlannerParams params = cfg.planner_params;
  params.budget_s = cfg.budget_s;
  params.seed = task.seed;

  PlanResult res;
  if (task.planner == "memory") {
    res = plan_memory_guided(scene, cfg.robot, start, *task.store, params);
  } else if (task.planner == "dromos") {
    res = plan_baseline_roadmap(scene, cfg.robot, start, params);
  } else if (task.planner == "seqrrt") {
    res = plan_sequential_rrt(scene, cfg.robot, start, params);
  } else {
    throw std::invalid_argument("unknown planner: " + task.planner);
  }
  row.status = res.status == PlanStatus::solved ? "solved" : "timeout";
  row.runtime_s = res.runtime_s;
  if (res.status == PlanStatus::solved) row.distance_m = res.distance_m;
  row.tree_nodes = res.tree_nodes;
  return row;
}

int worker_count() {
  if (const char* env = std::getenv("MGMM_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

std::vector<CellStats> aggregate_rows(const std::vector<InstanceRow>& rows, double trim) {
  std::vector<CellStats> cells;
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<const InstanceRow*>> by_cell;
  for (const auto& r : rows) {
    by_cell[{r.scene_class, r.layout, r.planner}].push_back(&r);
  }
  for (const auto& [key, cell_rows] : by_cell) {
    CellStats c;
    c.scene_class = std::get<0>(key);
    c.layout = std::get<1>(key);
    c.planner = std::get<2>(key);
    c.instances = static_cast<int>(cell_rows.size());
    std::vector<double> runtimes, distances;
    int solved = 0;
    for (const auto* r : cell_rows) {
      runtimes.push_back(r->runtime_s);
      if (r->status == "solved") {
        ++solved;
        distances.push_back(r->distance_m);
      }
    }
    c.success_rate = static_cast<double>(solved) / static_cast<double>(cell_rows.size());
    c.trimmed_runtime_s = trimmed_mean(runtimes, trim);
    c.trimmed_distance_m = distances.empty() ? nan_value() : trimmed_mean(distances, trim);
    cells.push_back(std::move(c));
  }
  return cells;
}

BenchmarkReport run_benchmark(const BenchmarkConfig& cfg) {
  cfg.validate();

  // Stores load once per cell; the planner gets the deserialized store.
  std::map<std::string, MemoryStore> stores;
  const bool wants_memory =
      std::find(cfg.planners.begin(), cfg.planners.end(), "memory") != cfg.planners.end();
  if (wants_memory) {
    for (SceneClass cls : cfg.classes) {
      for (GoalLayout layout : cfg.layouts) {
        const std::string key = cell_key(cls, layout);
        const auto it = cfg.stores.find(key);
        if (it != cfg.stores.end()) {
          stores.emplace(key, MemoryStore::load(it->second));
        }
      }
    }
  }

  std::vector<Task> tasks;
  std::vector<InstanceRow> skipped;
  for (SceneClass cls : cfg.classes) {
    for (GoalLayout layout : cfg.layouts) {
      for (const std::string& planner : cfg.planners) {
        const MemoryStore* store = nullptr;
        if (planner == "memory") {
          const auto it = stores.find(cell_key(cls, layout));
          if (it == stores.end()) {
            std::fprintf(stderr, "warning: no store for cell %s, skipping memory planner\n",
                         cell_key(cls, layout).c_str());
            InstanceRow row;
            row.scene_class = to_string(cls);
            row.layout = to_string(layout);
            row.planner = planner;
            row.instance_id = -1;
            row.seed = 0;
            row.status = "skipped";
            row.runtime_s = 0.0;
            row.distance_m = nan_value();
            skipped.push_back(row);
            continue;
          }
          store = &it->second;
        }
        for (int i = 0; i < cfg.instances; ++i) {
          tasks.push_back(Task{cls, layout, planner, i, cfg.seed_base + static_cast<uint64_t>(i), store});
        }
      }
    }
  }

  std::vector<InstanceRow> rows(tasks.size());
  std::atomic<size_t> next{0};
  const int workers = std::min<int>(worker_count(), static_cast<int>(tasks.size()) > 0 ? static_cast<int>(tasks.size()) : 1);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        rows[i] = run_task(tasks[i], cfg);
      }
    });
  }
  for (auto& t : pool) t.join();

  BenchmarkReport report;
  report.rows = std::move(rows);
  report.rows.insert(report.rows.end(), skipped.begin(), skipped.end());
  std::vector<InstanceRow> scored;
  for (const auto& r : report.rows) {
    if (r.status != "skipped") scored.push_back(r);
  }
  report.cells = aggregate_rows(scored, cfg.trim);
  return report;
}

// ---- CSV ---------------------------------------------------------------------

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

std::string report_to_csv(const BenchmarkReport& report, const std::string& timestamp) {
  std::ostringstream os;
  os << "# mgmm bench " << timestamp << "\n";
  os << "scene_class,layout,planner,instance_id,seed,status,runtime_s,distance_m,tree_nodes\n";
  for (const auto& r : report.rows) {
    os << r.scene_class << ',' << r.layout << ',' << r.planner << ',' << r.instance_id
       << ',' << r.seed << ',' << r.status << ',' << format_double(r.runtime_s) << ','
       << format_double(r.distance_m) << ',' << r.tree_nodes << "\n";
  }
  return os.str();
}

std::vector<InstanceRow> rows_from_csv(const std::string& text) {
  std::vector<InstanceRow> rows;
  std::istringstream is(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::istringstream ls(line);
    std::string field;
    InstanceRow r;
    std::getline(ls, r.scene_class, ',');
    std::getline(ls, r.layout, ',');
    std::getline(ls, r.planner, ',');
    std::getline(ls, field, ',');
    r.instance_id = std::stoi(field);
    std::getline(ls, field, ',');
    r.seed = std::stoull(field);
    std::getline(ls, r.status, ',');
    std::getline(ls, field, ',');
    r.runtime_s = std::stod(field);
    std::getline(ls, field, ',');
    r.distance_m = field == "nan" ? nan_value() : std::stod(field);
    std::getline(ls, field, ',');
    r.tree_nodes = static_cast<size_t>(std::stoull(field));
    rows.push_back(std::move(r));
  }
  return rows;
}

BenchmarkConfig benchmark_config_from_json(const std::string& text) {
  const json j = json::parse(text);
  BenchmarkConfig cfg;
  cfg.classes.clear();
  for (const auto& c : j.at("scene_classes")) {
    cfg.classes.push_back(scene_class_from_string(c.get<std::string>()));
  }
  for (const auto& l : j.at("layouts")) {
    cfg.layouts.push_back(layout_from_string(l.get<std::string>()));
  }
  cfg.instances = j.value("instances", 50);
  cfg.budget_s = j.value("budget_s", 10.0);
  cfg.trim = j.value("trim", 0.25);
  cfg.seed_base = j.value("seed_base", uint64_t{9000});
  for (const auto& p : j.at("planners")) cfg.planners.push_back(p.get<std::string>());
  const std::string robot = j.value("robot", std::string("car"));
  cfg.robot = robot_kind_from_string(robot) == RobotModel::Kind::car ? RobotModel::car()
                                                                     : RobotModel::snake();
  if (j.contains("stores")) {
    for (const auto& [key, value] : j.at("stores").items()) {
      cfg.stores[key] = value.get<std::string>();
    }
  }
  cfg.validate();
  return cfg;
}

// ---- plotting ------------------------------------------------------------------

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

std::string plot_trajectory(const Scene& scene, const PlanResult& result) {
  if (result.status != PlanStatus::solved) {
    throw std::invalid_argument("plot_trajectory: result is not solved");
  }
  const double scale = 20.0;
  const double w = scene.bounds.width() * scale;
  const double h = scene.bounds.height() * scale;
  const auto X = [&](double x) { return fmt((x - scene.bounds.xmin) * scale); };
  const auto Y = [&](double y) { return fmt(h - (y - scene.bounds.ymin) * scale); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w) << "\" height=\""
     << fmt(h) << "\" viewBox=\"0 0 " << fmt(w) << " " << fmt(h) << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
     << "\" fill=\"white\" stroke=\"black\"/>\n";
  for (const auto& o : scene.obstacles) {
    const Aabb b = o.aabb();
    os << "<rect x=\"" << X(b.xmin) << "\" y=\"" << Y(b.ymax) << "\" width=\""
       << fmt(b.width() * scale) << "\" height=\"" << fmt(b.height() * scale)
       << "\" fill=\"#555555\"/>\n";
  }
  for (size_t i = 0; i < scene.goals.size(); ++i) {
    const auto& g = scene.goals[i];
    os << "<circle cx=\"" << X(g.center.x) << "\" cy=\"" << Y(g.center.y) << "\" r=\""
       << fmt(g.radius * scale) << "\" fill=\"none\" stroke=\"#2a7f2a\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << X(g.center.x + 0.6) << "\" y=\"" << Y(g.center.y + 0.6)
       << "\" font-size=\"14\" fill=\"#2a7f2a\">" << i << "</text>\n";
  }
  os << "<polyline fill=\"none\" stroke=\"#b03030\" stroke-width=\"1.5\" points=\"";
  for (const auto& s : result.trajectory.states) {
    os << X(s.x) << ',' << Y(s.y) << ' ';
  }
  os << "\"/>\n";
  if (!result.trajectory.states.empty()) {
    const auto& s0 = result.trajectory.states.front();
    os << "<circle cx=\"" << X(s0.x) << "\" cy=\"" << Y(s0.y)
       << "\" r=\"5\" fill=\"#3050c0\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string map_to_json(const MotionMap& map) {
  json j;
  json nodes = json::array();
  for (const auto& n : map.nodes) nodes.push_back({n.x, n.y});
  j["nodes"] = nodes;
  json edges = json::array();
  for (size_t i = 0; i < map.adj.size(); ++i) {
    for (const auto& e : map.adj[i]) {
      if (e.to > static_cast<int>(i)) edges.push_back({static_cast<int>(i), e.to});
    }
  }
  j["edges"] = edges;
  return j.dump() + "\n";
}

}  // namespace mgmm
