#include "mgmm/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "mgmm/effort.hpp"

namespace mgmm {

RobotModel RobotModel::car() {
  RobotModel m;
  m.kind = Kind::car;
  return m;
}

RobotModel RobotModel::snake() {
  RobotModel m;
  m.kind = Kind::snake;
  return m;
}

double RobotModel::circumradius() const {
  if (kind == Kind::car) {
    return std::hypot(body_half_len(), body_half_wid());
  }
  // Links pass through gaps one at a time; the binding piece is one capsule.
  return 0.5 * hitch + cap_radius;
}

RobotModel::Kind robot_kind_from_string(const std::string& s) {
  if (s == "car") return RobotModel::Kind::car;
  if (s == "snake") return RobotModel::Kind::snake;
  throw std::invalid_argument("unknown robot kind: " + s);
}

std::string to_string(RobotModel::Kind k) {
  return k == RobotModel::Kind::car ? "car" : "snake";
}

double Trajectory::length() const {
  double sum = 0.0;
  for (size_t i = 1; i < states.size(); ++i) {
    sum += std::hypot(states[i].x - states[i - 1].x, states[i].y - states[i - 1].y);
  }
  return sum;
}

std::vector<Vec2> Trajectory::positions() const {
  std::vector<Vec2> p;
  p.reserve(states.size());
  for (const auto& s : states) p.push_back(s.position());
  return p;
}

StateDerivative car_derivative(const RobotState& s, const Action& a, double L) {
  StateDerivative d;
  d.dx = s.v * std::cos(s.theta) * std::cos(s.psi);
  d.dy = s.v * std::sin(s.theta) * std::cos(s.psi);
  d.dtheta = s.v * std::sin(s.psi) / L;
  d.dv = a.acc;
  d.dpsi = a.omega;
  return d;
}

StateDerivative snake_derivative(const RobotState& s, const Action& a, double L,
                                 double H, int N) {
  StateDerivative d = car_derivative(s, a, L);
  d.dtrailer.resize(static_cast<size_t>(N));
  double prod = 1.0;
  double prev = s.theta;  // theta_0
  for (int i = 0; i < N; ++i) {
    double ti = s.trailer[static_cast<size_t>(i)];
    d.dtrailer[static_cast<size_t>(i)] = (s.v / H) * std::sin(prev - ti) * prod;
    prod *= std::cos(prev - ti);
    prev = ti;
  }
  return d;
}

Action clamp_action(const RobotModel& m, Action a) {
  a.acc = std::clamp(a.acc, -m.limits.acc_max, m.limits.acc_max);
  a.omega = std::clamp(a.omega, -m.limits.omega_max, m.limits.omega_max);
  return a;
}

RobotState clamp_state(const RobotModel& m, RobotState s) {
  s.v = std::clamp(s.v, -m.limits.v_max, m.limits.v_max);
  s.psi = std::clamp(s.psi, -m.limits.psi_max, m.limits.psi_max);
  s.theta = wrap_angle(s.theta);
  for (double& t : s.trailer) t = wrap_angle(t);
  return s;
}

namespace {

StateDerivative eval(const RobotModel& m, const RobotState& s, const Action& a) {
  effort().dyn_evals += 1;
  if (m.kind == RobotModel::Kind::car) {
    return car_derivative(s, a, m.wheelbase);
  }
  effort().trailer_terms += static_cast<uint64_t>(m.trailers);
  return snake_derivative(s, a, m.wheelbase, m.hitch, m.trailers);
}

RobotState advance(const RobotState& s, const StateDerivative& d, double h) {
  RobotState r = s;
  r.x += h * d.dx;
  r.y += h * d.dy;
  r.theta += h * d.dtheta;
  r.psi += h * d.dpsi;
  r.v += h * d.dv;
  for (size_t i = 0; i < r.trailer.size(); ++i) r.trailer[i] += h * d.dtrailer[i];
  return r;
}

}  // namespace

RobotState simulate(const RobotModel& m, const RobotState& s, const Action& a,
                    double dt) {
  const StateDerivative k1 = eval(m, s, a);
  const StateDerivative k2 = eval(m, advance(s, k1, 0.5 * dt), a);
  const StateDerivative k3 = eval(m, advance(s, k2, 0.5 * dt), a);
  const StateDerivative k4 = eval(m, advance(s, k3, dt), a);

  RobotState r = s;
  const double h = dt / 6.0;
  r.x += h * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
  r.y += h * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy);
  r.theta += h * (k1.dtheta + 2.0 * k2.dtheta + 2.0 * k3.dtheta + k4.dtheta);
  r.psi += h * (k1.dpsi + 2.0 * k2.dpsi + 2.0 * k3.dpsi + k4.dpsi);
  r.v += h * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
  for (size_t i = 0; i < r.trailer.size(); ++i) {
    r.trailer[i] += h * (k1.dtrailer[i] + 2.0 * k2.dtrailer[i] +
                         2.0 * k3.dtrailer[i] + k4.dtrailer[i]);
  }
  return clamp_state(m, r);
}

Trajectory rollout(const RobotModel& m, const RobotState& s0,
                   std::span<const Action> actions, double dt) {
  Trajectory t;
  t.dt = dt;
  t.states.reserve(actions.size() + 1);
  t.actions.assign(actions.begin(), actions.end());
  t.states.push_back(s0);
  for (const Action& a : actions) {
    t.states.push_back(simulate(m, t.states.back(), a, dt));
  }
  return t;
}

std::vector<Vec2> snake_joints(const RobotModel& m, const RobotState& s) {
  std::vector<Vec2> joints;
  joints.reserve(static_cast<size_t>(m.trailers) + 1);
  Vec2 p{s.x, s.y};
  joints.push_back(p);
  for (int i = 0; i < m.trailers; ++i) {
    double t = s.trailer[static_cast<size_t>(i)];
    p = p - Vec2{m.hitch * std::cos(t), m.hitch * std::sin(t)};
    joints.push_back(p);
  }
  return joints;
}

PidSteer::PidSteer(const RobotModel& m, double dt) : model_(m), dt_(dt) {}

Action PidSteer::control(const RobotState& s, Vec2 target) {
  constexpr double kHeadingP = 2.0;
  constexpr double kHeadingD = 0.3;
  constexpr double kSpeedP = 1.0;

  const double bearing = std::atan2(target.y - s.y, target.x - s.x);
  const double err = wrap_angle(bearing - s.theta);
  const double derr = first_ ? 0.0 : (err - prev_err_) / dt_;
  first_ = false;
  prev_err_ = err;

  const double psi_des =
      std::clamp(kHeadingP * err + kHeadingD * derr, -model_.limits.psi_max,
                 model_.limits.psi_max);

  // Slow down through sharp heading corrections so the turn stays feasible.
  double v_des = model_.cruise;
  const double abs_err = std::fabs(err);
  if (abs_err > kPi / 4.0) {
    v_des = model_.cruise * std::max(0.15, 1.0 - (abs_err - kPi / 4.0) / (0.75 * kPi));
  }

  Action a;
  a.omega = (psi_des - s.psi) / dt_;
  a.acc = kSpeedP * (v_des - s.v);
  return clamp_action(model_, a);
}

}  // namespace mgmm
