#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace mgmm {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Vec2&) const = default;
  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double k) const { return {x * k, y * k}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Normalizes an angle to (-pi, pi].
inline double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * kPi);
  return r <= -kPi ? r + 2.0 * kPi : r;
}

/// Axis-aligned box, closed intervals.
struct Aabb {
  double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  Vec2 center() const { return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)}; }
  bool contains(Vec2 p) const {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
  bool contains(const Aabb& o) const {
    return o.xmin >= xmin && o.xmax <= xmax && o.ymin >= ymin && o.ymax <= ymax;
  }
  /// Closed-interval intersection (touching boxes intersect).
  bool intersects(const Aabb& o) const {
    return xmin <= o.xmax && o.xmin <= xmax && ymin <= o.ymax && o.ymin <= ymax;
  }
  /// Positive-area overlap (touching boxes do not count).
  bool overlaps_open(const Aabb& o) const {
    return xmin < o.xmax && o.xmin < xmax && ymin < o.ymax && o.ymin < ymax;
  }
  Aabb shrunk(double m) const { return {xmin + m, ymin + m, xmax - m, ymax - m}; }
};

inline double point_aabb_distance(Vec2 p, const Aabb& b) {
  double dx = std::max({b.xmin - p.x, 0.0, p.x - b.xmax});
  double dy = std::max({b.ymin - p.y, 0.0, p.y - b.ymax});
  return std::hypot(dx, dy);
}

/// Oriented box: center, heading of the long axis, half extents.
struct Obb {
  Vec2 center;
  double heading = 0.0;
  double half_len = 0.0;
  double half_wid = 0.0;

  std::array<Vec2, 4> corners() const {
    double c = std::cos(heading), s = std::sin(heading);
    Vec2 ax{c * half_len, s * half_len};
    Vec2 ay{-s * half_wid, c * half_wid};
    return {center + ax + ay, center + ax - ay, center - ax - ay, center - ax + ay};
  }
};

/// Separating-axis test; touching counts as intersecting.
bool obb_intersects_aabb(const Obb& b, const Aabb& r);

double segment_point_distance(Vec2 a, Vec2 b, Vec2 p);
bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2);
double segment_segment_distance(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2);
bool segment_intersects_aabb(Vec2 a, Vec2 b, const Aabb& r);
double segment_aabb_distance(Vec2 a, Vec2 b, const Aabb& r);

double polyline_length(std::span<const Vec2> pts);
double point_polyline_distance(Vec2 p, std::span<const Vec2> pts);

}  // namespace mgmm
