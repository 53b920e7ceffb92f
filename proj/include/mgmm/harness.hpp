#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mgmm/memory.hpp"
#include "mgmm/planner.hpp"
#include "mgmm/world.hpp"

namespace mgmm {

/// Mean after dropping floor(fraction * n) values at each end of the sorted
/// sample. Throws when nothing remains.
double trimmed_mean(std::vector<double> values, double fraction);

// ---- training-data production ---------------------------------------------

/// Plans one goal-to-goal experience: shortest grid path with clearance,
/// line-of-sight shortcutting, then PID tracking into a dynamically-feasible
/// trajectory. Empty when the scene defeats the tracker.
std::optional<Trajectory> plan_pair_experience(const Scene& scene,
                                               const RobotModel& model, int from_goal,
                                               int to_goal, double dt = 0.05);

struct ExperienceConfig {
  int originals = 20;       // original problems per goal pair
  int augmentations = 25;   // augmented environments per original
  int grid_resolution = 32;
  uint64_t seed = 1;
  double holdout = 0.0;     // fraction of augmentations held out per cluster
  TrainConfig train;
  AugmentParams augment;
};

struct HoldoutSample {
  std::pair<int, int> pair;
  int cluster = 0;
  OccupancyGrid grid;
  Scene scene;
};

struct TrainedStore {
  MemoryStore store;
  std::vector<HoldoutSample> holdout;
  int skipped_plans = 0;  // originals whose experience plan failed
};

/// Builds a full memory store from original scenes: per ordered goal pair,
/// plan each original, augment, rasterize, train the encoder, and compute
/// centroids. Deterministic given the config seed.
TrainedStore train_store(const std::vector<Scene>& originals, SceneClass cls,
                         GoalLayout layout, const RobotModel& model,
                         const ExperienceConfig& cfg);

// ---- benchmarking ----------------------------------------------------------

struct BenchmarkConfig {
  std::vector<SceneClass> classes;
  std::vector<GoalLayout> layouts;
  int instances = 50;
  double budget_s = 10.0;
  double trim = 0.25;
  uint64_t seed_base = 9000;
  std::vector<std::string> planners;  // memory | dromos | seqrrt
  RobotModel robot = RobotModel::car();
  // store path per "class/layout" cell, required for the memory planner
  std::map<std::string, std::string> stores;
  PlannerParams planner_params;

  void validate() const;
};

struct InstanceRow {
  std::string scene_class;
  std::string layout;
  std::string planner;
  int instance_id = 0;
  uint64_t seed = 0;
  std::string status;  // solved | timeout | skipped
  double runtime_s = 0.0;
  double distance_m = 0.0;  // NaN unless solved
  size_t tree_nodes = 0;
};

struct CellStats {
  std::string scene_class;
  std::string layout;
  std::string planner;
  int instances = 0;
  double success_rate = 0.0;
  double trimmed_runtime_s = 0.0;
  double trimmed_distance_m = 0.0;  // over solved rows; NaN if none
};

struct BenchmarkReport {
  std::vector<InstanceRow> rows;
  std::vector<CellStats> cells;
};

/// Runs every (planner, instance) pair of the config. Instances regenerate
/// deterministically from seed_base; MGMM_WORKERS caps parallel workers.
BenchmarkReport run_benchmark(const BenchmarkConfig& cfg);

/// Recomputes the per-cell statistics from instance rows.
std::vector<CellStats> aggregate_rows(const std::vector<InstanceRow>& rows, double trim);

std::string report_to_csv(const BenchmarkReport& report, const std::string& timestamp);
std::vector<InstanceRow> rows_from_csv(const std::string& text);

BenchmarkConfig benchmark_config_from_json(const std::string& text);

// ---- plotting --------------------------------------------------------------

/// Deterministic SVG rendering of a solved instance: obstacles, indexed
/// goals, the trajectory polyline, and a start marker. Throws on unsolved
/// results.
std::string plot_trajectory(const Scene& scene, const PlanResult& result);

/// Debug rendering of motion-map nodes and edges as JSON.
std::string map_to_json(const MotionMap& map);

}  // namespace mgmm
