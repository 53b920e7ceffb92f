#include <doctest.h>

#include <chrono>

#include "mgmm/harness.hpp"
#include "mgmm/planner.hpp"
#include "mgmm/rng.hpp"

using namespace mgmm;

namespace {

Scene empty_scene() {
  Scene s;
  s.bounds = {0.0, 0.0, 30.0, 30.0};
  s.goals = layout_goals(GoalLayout::grid2x2);
  s.id = "empty";
  return s;
}

bool replays_exactly(const Scene& scene, const RobotModel& model, const PlanResult& r) {
  const Trajectory replay =
      rollout(model, r.trajectory.states.front(), r.trajectory.actions, r.trajectory.dt);
  if (replay.states.size() != r.trajectory.states.size()) return false;
  for (size_t i = 0; i < replay.states.size(); ++i) {
    const RobotState& a = replay.states[i];
    const RobotState& b = r.trajectory.states[i];
    if (a.x != b.x || a.y != b.y || a.theta != b.theta || a.psi != b.psi || a.v != b.v) {
      return false;
    }
    if (is_state_colliding(scene, model, a)) return false;
  }
  return visits_in_order(scene, r.trajectory, r.goal_order);
}

MemoryStore quick_store(SceneClass cls, GoalLayout layout) {
  std::vector<Scene> scenes;
  for (int i = 0; i < 5; ++i) {
    scenes.push_back(generate_scene(cls, layout, 2000 + static_cast<uint64_t>(i)));
  }
  ExperienceConfig cfg;
  cfg.originals = 5;
  cfg.augmentations = 4;
  cfg.train.epochs = 4;
  cfg.seed = 77;
  return train_store(scenes, cls, layout, RobotModel::car(), cfg).store;
}

}  // namespace

TEST_CASE("group priority decreases with selections and with tour cost") {
  CHECK(group_priority(10.0, 1) < group_priority(10.0, 0));
  CHECK(group_priority(10.0, 7) < group_priority(10.0, 6));
  CHECK(group_priority(20.0, 0) < group_priority(10.0, 0));
  CHECK(group_priority(5.0, 0) == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("select_target: empty path yields a collision-free random sample") {
  const Scene scene = generate_scene(SceneClass::random, GoalLayout::grid2x2, 90);
  std::vector<Vec2> pending;
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const Vec2 t = select_target(scene, pending, 1.0, 10, 0.58, rng);
    CHECK(scene.bounds.contains(t));
    CHECK_FALSE(point_colliding(scene, t, 0.58));
  }
}

TEST_CASE("select_target samples near the head coordinate and consumes it") {
  const Scene scene = empty_scene();
  std::vector<Vec2> pending{{10.0, 10.0}, {12.0, 10.0}};
  Rng rng(2);
  const Vec2 t = select_target(scene, pending, 1.0, 10, 0.58, rng);
  CHECK(distance(t, {10.0, 10.0}) <= 1.0 + 1e-9);
  CHECK(pending.size() == 1);
  CHECK(pending.front().x == 12.0);
}

TEST_CASE("select_target falls back to random when the disc is buried") {
  Scene scene = empty_scene();
  scene.obstacles.push_back({{10.0, 10.0}, 2.5, 2.5});  // swallows the vicinity disc
  std::vector<Vec2> pending{{10.0, 10.0}, {20.0, 20.0}};
  Rng rng(3);
  const Vec2 t = select_target(scene, pending, 1.0, 10, 0.58, rng);
  CHECK(distance(t, {10.0, 10.0}) > 1.0);
  CHECK_FALSE(point_colliding(scene, t, 0.58));
  // The buried coordinate was dropped so the leg can continue.
  CHECK(pending.size() == 1);
}

TEST_CASE("visits_in_order checks the monotone subsequence") {
  const Scene scene = empty_scene();
  Trajectory t;
  t.dt = 0.05;
  for (const Vec2 p : {Vec2{10, 10}, Vec2{20, 10}, Vec2{20, 20}}) {
    RobotState s;
    s.x = p.x;
    s.y = p.y;
    t.states.push_back(s);
  }
  CHECK(visits_in_order(scene, t, {0, 1, 3}));
  CHECK_FALSE(visits_in_order(scene, t, {1, 0}));
  CHECK_FALSE(visits_in_order(scene, t, {2}));
}

TEST_CASE("baseline roadmap planner solves an empty 2x2 world quickly") {
  const Scene scene = empty_scene();
  const RobotModel model = RobotModel::car();
  const RobotState start = instance_start(scene, model, 4);
  PlannerParams params;
  params.seed = 4;
  const PlanResult r = plan_baseline_roadmap(scene, model, start, params);
  REQUIRE(r.status == PlanStatus::solved);
  CHECK(r.runtime_s < 1.0);
  CHECK(r.goal_order.size() == 4);
  CHECK(replays_exactly(scene, model, r));
}

TEST_CASE("sequential rrt solves an empty 2x2 world and orders goals greedily") {
  const Scene scene = empty_scene();
  const RobotModel model = RobotModel::car();
  const RobotState start = instance_start(scene, model, 5);
  PlannerParams params;
  params.seed = 5;
  const PlanResult r = plan_sequential_rrt(scene, model, start, params);
  REQUIRE(r.status == PlanStatus::solved);
  CHECK(replays_exactly(scene, model, r));

  // Euclidean nearest-next from the current position defines the order.
  std::vector<int> expected;
  Vec2 pos = start.position();
  uint32_t mask = 0;
  for (size_t g = 0; g < scene.goals.size(); ++g) {
    if (scene.goals[g].contains(pos)) {
      mask |= uint32_t{1} << g;
      expected.push_back(static_cast<int>(g));
    }
  }
  while (expected.size() < scene.goals.size()) {
    int best = -1;
    double bd = 1e18;
    for (size_t g = 0; g < scene.goals.size(); ++g) {
      if (mask & (uint32_t{1} << g)) continue;
      const double d = distance(pos, scene.goals[g].center);
      if (d < bd) {
        bd = d;
        best = static_cast<int>(g);
      }
    }
    expected.push_back(best);
    mask |= uint32_t{1} << best;
    pos = scene.goals[static_cast<size_t>(best)].center;
  }
  CHECK(r.goal_order == expected);
}

TEST_CASE("memory-guided planner solves fresh scenes with a small store") {
  const MemoryStore store = quick_store(SceneClass::random, GoalLayout::grid2x2);
  const RobotModel model = RobotModel::car();
  for (uint64_t seed : {3000ULL, 3001ULL}) {
    const Scene scene = generate_scene(SceneClass::random, GoalLayout::grid2x2, seed);
    const RobotState start = instance_start(scene, model, seed);
    PlannerParams params;
    params.seed = seed;
    const PlanResult r = plan_memory_guided(scene, model, start, store, params);
    REQUIRE(r.status == PlanStatus::solved);
    CHECK(replays_exactly(scene, model, r));
    CHECK(r.distance_m == doctest::Approx(r.trajectory.length()));
  }
}

TEST_CASE("snake plans replay exactly too") {
  const Scene scene = generate_scene(SceneClass::random, GoalLayout::grid2x2, 3100);
  const RobotModel model = RobotModel::snake();
  const RobotState start = instance_start(scene, model, 6);
  PlannerParams params;
  params.seed = 6;
  const PlanResult r = plan_baseline_roadmap(scene, model, start, params);
  REQUIRE(r.status == PlanStatus::solved);
  CHECK(replays_exactly(scene, model, r));
}

TEST_CASE("seeded runs are reproducible to the byte") {
  const Scene scene = generate_scene(SceneClass::random, GoalLayout::grid2x2, 3200);
  const RobotModel model = RobotModel::car();
  const RobotState start = instance_start(scene, model, 7);
  PlannerParams params;
  params.seed = 7;
  std::string first;
  for (int rep = 0; rep < 3; ++rep) {
    const PlanResult r = plan_baseline_roadmap(scene, model, start, params);
    const std::string json = result_to_json(r, scene, model);
    if (rep == 0) {
      first = json;
    } else {
      CHECK(json == first);
    }
  }
}

TEST_CASE("budget is honored in instrumented and wall time") {
  const Scene scene = generate_scene(SceneClass::maze, GoalLayout::grid3x3, 3300);
  const RobotModel model = RobotModel::car();
  const RobotState start = instance_start(scene, model, 8);
  PlannerParams params;
  params.seed = 8;
  params.budget_s = 0.2;
  const auto wall0 = std::chrono::steady_clock::now();
  const PlanResult r = plan_sequential_rrt(scene, model, start, params);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  CHECK(r.runtime_s <= params.budget_s + 1e-9);
  CHECK(wall <= params.budget_s + 2.0);
  if (r.status == PlanStatus::timeout) CHECK(r.runtime_s == doctest::Approx(params.budget_s));
}

TEST_CASE("instance_start parks the robot at a goal center") {
  const Scene scene = generate_scene(SceneClass::storage, GoalLayout::grid3x3, 3400);
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const RobotState s = instance_start(scene, RobotModel::car(), seed);
    bool at_goal = false;
    for (const auto& g : scene.goals) {
      if (g.center.x == s.x && g.center.y == s.y) at_goal = true;
    }
    CHECK(at_goal);
    CHECK_FALSE(is_state_colliding(scene, RobotModel::car(), s));
  }
  const RobotState a = instance_start(scene, RobotModel::car(), 11);
  const RobotState b = instance_start(scene, RobotModel::car(), 11);
  CHECK(a.x == b.x);
  CHECK(a.theta == b.theta);
}
