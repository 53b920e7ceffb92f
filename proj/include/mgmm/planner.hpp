#pragma once

#include <string>
#include <vector>

#include "mgmm/memory.hpp"
#include "mgmm/motionmap.hpp"
#include "mgmm/world.hpp"

namespace mgmm {

enum class PlanStatus { solved, timeout };

struct PlanResult {
  PlanStatus status = PlanStatus::timeout;
  std::string planner;
  uint64_t seed = 0;
  double budget_s = 0.0;
  Trajectory trajectory;        // root-to-solution chain when solved
  std::vector<int> goal_order;  // goal indices in visit order
  double runtime_s = 0.0;       // instrumented seconds (deterministic)
  double distance_m = 0.0;
  size_t tree_nodes = 0;
  size_t groups = 0;
};

struct PlannerParams {
  double budget_s = 10.0;
  uint64_t seed = 1;
  double dt = 0.05;

  // motion map / roadmap
  double r_vic = 1.0;
  double r_conn = 2.5;
  int vic_tries = 5;
  double edge_step = 0.1;
  double guide_spacing = 0.9;  // guide-path coordinate decimation
  int roadmap_batch = 300;     // uniform roadmap growth per round
  int roadmap_cap = 3000;

  // tree expansion
  double target_vic = 0.5;  // sampling disc around guide coordinates
  double target_radius = 0.5;
  int extend_steps = 80;
  int target_retries = 10;
  double alpha = 0.95;      // priority decay per selection
  double eps_cost = 1.0;    // meters, priority denominator offset
  double anchor_radius = 2.0;
  int exact_tour_limit = 10;

  // sequential RRT
  int rrt_extend_steps = 40;
  double rrt_goal_bias = 0.1;

  size_t max_nodes = 2000000;
};

/// Group weight: alpha^selections / (eps + tour cost). Strictly decreases
/// with every selection of the group, failed extensions included.
double group_priority(double tour_cost, int selections, double alpha = 0.95,
                      double eps = 1.0);

/// Next expansion target for a node whose group follows `pending`: a sample
/// inside the vicinity disc of the first pending coordinate (consumed on
/// success), or a uniform collision-free sample when the path is exhausted
/// or every vicinity attempt collides.
Vec2 select_target(const Scene& scene, std::vector<Vec2>& pending, double r_vic,
                   int retries, double inflate, Rng& rng);

/// Memory-guided planner: retrieved paths build the motion map, retrieved
/// distances feed the tours, and tree expansion follows per-group guide
/// paths with PID extensions.
PlanResult plan_memory_guided(const Scene& scene, const RobotModel& model,
                              const RobotState& s_init, const MemoryStore& store,
                              const PlannerParams& params);

/// Same expansion skeleton on an unguided roadmap: uniform sampling grown
/// until the start and goals connect, tours from roadmap shortest-path costs.
PlanResult plan_baseline_roadmap(const Scene& scene, const RobotModel& model,
                                 const RobotState& s_init, const PlannerParams& params);

/// Goal-at-a-time RRT toward the Euclidean-nearest unvisited goal.
PlanResult plan_sequential_rrt(const Scene& scene, const RobotModel& model,
                               const RobotState& s_init, const PlannerParams& params);

std::string result_to_json(const PlanResult& result, const Scene& scene,
                           const RobotModel& model);

/// Start state for an instance: parked at a seed-chosen goal center with a
/// seed-chosen heading.
RobotState instance_start(const Scene& scene, const RobotModel& model, uint64_t seed);

/// Monotone in-order visitation check: the trajectory enters each goal of
/// `order` at some state index, strictly ordered as listed.
bool visits_in_order(const Scene& scene, const Trajectory& traj,
                     const std::vector<int>& order);

}  // namespace mgmm
