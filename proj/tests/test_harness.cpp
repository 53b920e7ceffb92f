#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "mgmm/harness.hpp"
#include "mgmm/rng.hpp"

using namespace mgmm;

TEST_CASE("trimmed mean definition") {
  CHECK(trimmed_mean({5, 5, 5, 5}, 0.25) == doctest::Approx(5.0));
  CHECK(trimmed_mean({1, 2, 3, 4, 100, 101, 102, 103}, 0.25) == doctest::Approx(52.0));
  CHECK(trimmed_mean({3, 1, 2}, 0.0) == doctest::Approx(2.0));
  CHECK(trimmed_mean({9}, 0.25) == doctest::Approx(9.0));
}

TEST_CASE("trimmed mean rejects bad input") {
  CHECK_THROWS_AS(trimmed_mean({}, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(trimmed_mean({1, 2}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(trimmed_mean({1, 2}, -0.1), std::invalid_argument);
}

TEST_CASE("benchmark config validation") {
  BenchmarkConfig cfg;
  cfg.instances = 3;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.instances = 4;
  cfg.trim = 0.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.trim = 0.25;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("experience plans start and end inside their goal regions") {
  const RobotModel car = RobotModel::car();
  for (uint64_t seed : {4000ULL, 4001ULL}) {
    const Scene scene = generate_scene(SceneClass::maze, GoalLayout::grid2x2, seed);
    const auto plan = plan_pair_experience(scene, car, 0, 3);
    REQUIRE(plan.has_value());
    CHECK(scene.goals[0].contains(plan->states.front().position()));
    CHECK(scene.goals[3].contains(plan->states.back().position()));
    CHECK(trajectory_collision_free(scene, car, *plan));
    // Replay invariant holds for experience plans as well.
    const Trajectory replay = rollout(car, plan->states.front(), plan->actions, plan->dt);
    CHECK(replay.states.back().x == plan->states.back().x);
    CHECK(replay.states.back().y == plan->states.back().y);
  }
}

TEST_CASE("benchmark: two planners x four instances give eight rows") {
  BenchmarkConfig cfg;
  cfg.classes = {SceneClass::random};
  cfg.layouts = {GoalLayout::grid2x2};
  cfg.instances = 4;
  cfg.budget_s = 10.0;
  cfg.trim = 0.25;
  cfg.seed_base = 5000;
  cfg.planners = {"dromos", "seqrrt"};
  const BenchmarkReport report = run_benchmark(cfg);
  CHECK(report.rows.size() == 8);

  for (const auto& row : report.rows) {
    if (row.status == "solved") {
      CHECK(row.runtime_s <= cfg.budget_s);
      CHECK(row.distance_m > 0.0);
    } else {
      CHECK(std::isnan(row.distance_m));
    }
  }

  // Aggregates must equal an independent recomputation from the rows.
  for (const auto& cell : report.cells) {
    std::vector<double> runtimes, distances;
    int solved = 0, total = 0;
    for (const auto& row : report.rows) {
      if (row.planner != cell.planner) continue;
      ++total;
      runtimes.push_back(row.runtime_s);
      if (row.status == "solved") {
        ++solved;
        distances.push_back(row.distance_m);
      }
    }
    std::sort(runtimes.begin(), runtimes.end());
    const size_t k = static_cast<size_t>(0.25 * runtimes.size());
    double sum = 0.0;
    for (size_t i = k; i < runtimes.size() - k; ++i) sum += runtimes[i];
    CHECK(cell.trimmed_runtime_s == doctest::Approx(sum / (runtimes.size() - 2 * k)));
    CHECK(cell.success_rate == doctest::Approx(static_cast<double>(solved) / total));
    CHECK(cell.instances == total);
  }
}

TEST_CASE("memory planner cell without a store is skipped with a warning row") {
  BenchmarkConfig cfg;
  cfg.classes = {SceneClass::random};
  cfg.layouts = {GoalLayout::grid2x2};
  cfg.instances = 4;
  cfg.seed_base = 5100;
  cfg.planners = {"memory"};
  const BenchmarkReport report = run_benchmark(cfg);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].status == "skipped");
}

TEST_CASE("csv round-trips the rows exactly") {
  BenchmarkConfig cfg;
  cfg.classes = {SceneClass::random};
  cfg.layouts = {GoalLayout::grid2x2};
  cfg.instances = 4;
  cfg.seed_base = 5200;
  cfg.planners = {"seqrrt"};
  const BenchmarkReport report = run_benchmark(cfg);
  const std::string csv = report_to_csv(report, "2026-01-01T00:00:00");
  const auto rows = rows_from_csv(csv);
  REQUIRE(rows.size() == report.rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].scene_class == report.rows[i].scene_class);
    CHECK(rows[i].layout == report.rows[i].layout);
    CHECK(rows[i].planner == report.rows[i].planner);
    CHECK(rows[i].instance_id == report.rows[i].instance_id);
    CHECK(rows[i].seed == report.rows[i].seed);
    CHECK(rows[i].status == report.rows[i].status);
    CHECK(rows[i].runtime_s == doctest::Approx(report.rows[i].runtime_s).epsilon(1e-9));
    if (!std::isnan(report.rows[i].distance_m)) {
      CHECK(rows[i].distance_m == doctest::Approx(report.rows[i].distance_m).epsilon(1e-9));
    } else {
      CHECK(std::isnan(rows[i].distance_m));
    }
    CHECK(rows[i].tree_nodes == report.rows[i].tree_nodes);
  }
}

TEST_CASE("identical configs produce identical csv apart from the stamp line") {
  BenchmarkConfig cfg;
  cfg.classes = {SceneClass::random};
  cfg.layouts = {GoalLayout::grid2x2};
  cfg.instances = 4;
  cfg.seed_base = 5300;
  cfg.planners = {"dromos"};
  const std::string a = report_to_csv(run_benchmark(cfg), "stamp-a");
  const std::string b = report_to_csv(run_benchmark(cfg), "stamp-b");
  CHECK(a.substr(a.find('\n')) == b.substr(b.find('\n')));
}

TEST_CASE("benchmark config parses from json") {
  const std::string text = R"({
    "scene_classes": ["maze"],
    "layouts": ["3x3"],
    "instances": 8,
    "budget_s": 5.0,
    "trim": 0.25,
    "seed_base": 42,
    "planners": ["dromos", "seqrrt"],
    "robot": "snake",
    "stores": {"maze/3x3": "maze.mm"}
  })";
  const BenchmarkConfig cfg = benchmark_config_from_json(text);
  CHECK(cfg.classes.size() == 1);
  CHECK(cfg.instances == 8);
  CHECK(cfg.budget_s == 5.0);
  CHECK(cfg.robot.kind == RobotModel::Kind::snake);
  CHECK(cfg.stores.at("maze/3x3") == "maze.mm");
}

TEST_CASE("trajectory plot is deterministic and fails on unsolved results") {
  const Scene scene = generate_scene(SceneClass::random, GoalLayout::grid2x2, 5400);
  const RobotModel model = RobotModel::car();
  const RobotState start = instance_start(scene, model, 9);
  PlannerParams params;
  params.seed = 9;
  const PlanResult r = plan_baseline_roadmap(scene, model, start, params);
  REQUIRE(r.status == PlanStatus::solved);
  const std::string svg1 = plot_trajectory(scene, r);
  const std::string svg2 = plot_trajectory(scene, r);
  CHECK(svg1 == svg2);
  CHECK(svg1.find("<svg") == 0);
  CHECK(svg1.find("polyline") != std::string::npos);

  PlanResult failed;
  failed.status = PlanStatus::timeout;
  CHECK_THROWS_AS(plot_trajectory(scene, failed), std::invalid_argument);
}
