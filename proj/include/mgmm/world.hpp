#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mgmm/dynamics.hpp"
#include "mgmm/geometry.hpp"
#include "mgmm/rng.hpp"

namespace mgmm {

struct Obstacle {
  Vec2 center;
  double hw = 0.0;  // half width  (x)
  double hh = 0.0;  // half height (y)

  Aabb aabb() const {
    return {center.x - hw, center.y - hh, center.x + hw, center.y + hh};
  }
};

struct GoalRegion {
  Vec2 center;
  double radius = 0.5;

  bool contains(Vec2 p) const { return distance(p, center) <= radius; }
};

/// Immutable after construction; safe to share across planner instances.
struct Scene {
  Aabb bounds;
  std::vector<Obstacle> obstacles;
  std::vector<GoalRegion> goals;
  std::string id;
};

/// Binary rasterization of a scene; cell = 1 iff the cell rectangle overlaps
/// an obstacle with positive area. Row r spans y in [ymin + r*dy, ...),
/// column c spans x likewise.
struct OccupancyGrid {
  int resolution = 0;
  std::vector<uint8_t> cells;  // row-major, resolution x resolution

  uint8_t at(int r, int c) const { return cells[static_cast<size_t>(r) * resolution + c]; }
  uint8_t& at(int r, int c) { return cells[static_cast<size_t>(r) * resolution + c]; }
};

enum class SceneClass { random, curve, maze, storage };
enum class GoalLayout { grid2x2, grid3x3, grid4x4 };

SceneClass scene_class_from_string(const std::string& s);
std::string to_string(SceneClass c);
GoalLayout layout_from_string(const std::string& s);
std::string to_string(GoalLayout l);
int goals_per_side(GoalLayout l);

/// Fixed goal positions for a layout in the standard 30 m x 30 m world.
std::vector<GoalRegion> layout_goals(GoalLayout l);

// ---- collision checking -------------------------------------------------

/// Point with a clearance radius against obstacles and bounds.
bool point_colliding(const Scene& scene, Vec2 p, double inflate);

/// Straight segment with a clearance radius, checked by subdivision.
bool segment_colliding(const Scene& scene, Vec2 a, Vec2 b, double inflate,
                       double step = 0.1);

/// Full robot footprint at a state. Out-of-bounds placements collide.
bool is_state_colliding(const Scene& scene, const RobotModel& robot,
                        const RobotState& s);

/// True when every state of the trajectory is collision-free.
bool trajectory_collision_free(const Scene& scene, const RobotModel& robot,
                               const Trajectory& traj);

// ---- rasterization & connectivity ---------------------------------------

OccupancyGrid rasterize(const Scene& scene, int resolution);

/// Breadth-first search over free cells: true when every goal pair is
/// connected at grid level. `inflate` > 0 switches the free-cell predicate
/// to an inflated point check at the cell center.
bool goals_grid_connected(const Scene& scene, int resolution, double inflate = 0.0);

// ---- generation ----------------------------------------------------------

/// Places `count` uniform rectangles with half-extents in [hmin, hmax],
/// keeping `clearance` meters away from every goal disc. Throws after
/// `tries` failed placements of a single rectangle (overcrowded parameters).
std::vector<Obstacle> place_uniform_obstacles(const Aabb& bounds,
                                              const std::vector<GoalRegion>& goals,
                                              int count, double hmin, double hmax,
                                              double clearance, Rng& rng,
                                              int tries = 60);

/// Procedural scene generator. Goal positions depend only on the layout;
/// obstacles follow the class recipe. Deterministic per seed; throws when a
/// class recipe cannot produce a grid-connected scene after bounded retries.
Scene generate_scene(SceneClass cls, GoalLayout layout, uint64_t seed);

// ---- scene file format ----------------------------------------------------

std::string scene_to_json(const Scene& scene);
Scene scene_from_json(const std::string& text);
void save_scene(const Scene& scene, const std::string& path);
Scene load_scene(const std::string& path);

}  // namespace mgmm
