#pragma once

#include <string>
#include <vector>

#include "mgmm/geometry.hpp"

namespace mgmm {

struct ActuationLimits {
  double v_max = 2.25;      // m/s
  double psi_max = 1.5;     // rad
  double acc_max = 1.0;     // m/s^2
  double omega_max = 2.7;   // rad/s
};

/// Robot description: a car, or a car pulling `trailers` trailers hitched at
/// distance `hitch` (the snake). Footprints: the car is an oriented box of
/// wheelbase x 0.6*wheelbase; the snake is a chain of trailers+1 capsule
/// links of length `hitch` with cap radius `cap_radius`.
struct RobotModel {
  enum class Kind { car, snake };

  Kind kind = Kind::car;
  double wheelbase = 1.0;   // L
  double hitch = 0.3;       // H, snake only
  int trailers = 4;         // N, snake only
  double cap_radius = 0.15; // snake link radius
  double cruise = 1.5;      // m/s, speed setpoint for steering
  ActuationLimits limits;

  static RobotModel car();
  static RobotModel snake();

  double body_half_len() const { return 0.5 * wheelbase; }
  double body_half_wid() const { return 0.3 * wheelbase; }
  /// Radius of the largest rigid piece about its own reference point; used
  /// to inflate point checks when planning with position-only samples.
  double circumradius() const;
};

RobotModel::Kind robot_kind_from_string(const std::string& s);
std::string to_string(RobotModel::Kind k);

struct RobotState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double psi = 0.0;
  double v = 0.0;
  std::vector<double> trailer;  // theta_1..theta_N, snake only

  Vec2 position() const { return {x, y}; }
};

struct Action {
  double acc = 0.0;    // m/s^2
  double omega = 0.0;  // rad/s, steering rate
};

struct StateDerivative {
  double dx = 0.0, dy = 0.0, dtheta = 0.0, dpsi = 0.0, dv = 0.0;
  std::vector<double> dtrailer;
};

/// Dynamically-feasible trajectory: states.size() == actions.size() + 1 and
/// replaying the actions through simulate() reproduces the states bitwise.
struct Trajectory {
  std::vector<RobotState> states;
  std::vector<Action> actions;
  double dt = 0.05;

  double length() const;
  std::vector<Vec2> positions() const;
};

StateDerivative car_derivative(const RobotState& s, const Action& a, double L);
StateDerivative snake_derivative(const RobotState& s, const Action& a, double L,
                                 double H, int N);

Action clamp_action(const RobotModel& m, Action a);
/// Clamps v and psi to the limits and wraps all angles to (-pi, pi].
RobotState clamp_state(const RobotModel& m, RobotState s);

/// One fixed step of the motion equations (classical 4th-order Runge-Kutta),
/// followed by the state clamp. Deterministic.
RobotState simulate(const RobotModel& m, const RobotState& s, const Action& a,
                    double dt);

/// Joint chain of the snake: reference point plus one hitch point per
/// trailer. Element 0 is (x, y).
std::vector<Vec2> snake_joints(const RobotModel& m, const RobotState& s);

/// Replays an action sequence from s0; the result satisfies the Trajectory
/// replay invariant by construction.
Trajectory rollout(const RobotModel& m, const RobotState& s0,
                   std::span<const Action> actions, double dt);

/// Heading/speed controller used to extend the motion tree toward a target
/// point. One instance per extension episode; it keeps the previous heading
/// error for its derivative term.
class PidSteer {
 public:
  PidSteer(const RobotModel& m, double dt);

  Action control(const RobotState& s, Vec2 target);

 private:
  RobotModel model_;
  double dt_;
  double prev_err_ = 0.0;
  bool first_ = true;
};

}  // namespace mgmm
