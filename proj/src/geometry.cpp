#include "mgmm/geometry.hpp"

namespace mgmm {

namespace {

struct Interval {
  double lo, hi;
};

Interval project(std::span<const Vec2> pts, Vec2 axis) {
  double lo = pts[0].dot(axis), hi = lo;
  for (size_t i = 1; i < pts.size(); ++i) {
    double d = pts[i].dot(axis);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return {lo, hi};
}

bool separated(Interval a, Interval b) { return a.hi < b.lo || b.hi < a.lo; }

}  // namespace

bool obb_intersects_aabb(const Obb& b, const Aabb& r) {
  const auto bc = b.corners();
  const std::array<Vec2, 4> rc{{{r.xmin, r.ymin}, {r.xmax, r.ymin},
                                {r.xmax, r.ymax}, {r.xmin, r.ymax}}};
  const double c = std::cos(b.heading), s = std::sin(b.heading);
  const std::array<Vec2, 4> axes{{{1.0, 0.0}, {0.0, 1.0}, {c, s}, {-s, c}}};
  for (const Vec2& ax : axes) {
    if (separated(project(bc, ax), project(rc, ax))) return false;
  }
  return true;
}

double segment_point_distance(Vec2 a, Vec2 b, Vec2 p) {
  const Vec2 ab = b - a;
  const double len2 = ab.norm2();
  if (len2 <= 0.0) return distance(a, p);
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return distance(a + ab * t, p);
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const auto orient = [](Vec2 a, Vec2 b, Vec2 c) {
    const double v = (b - a).cross(c - a);
    return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
  };
  const auto on_seg = [](Vec2 a, Vec2 b, Vec2 c) {
    return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= c.y && c.y <= std::max(a.y, b.y);
  };
  const int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
  const int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_seg(p1, p2, q1)) return true;
  if (o2 == 0 && on_seg(p1, p2, q2)) return true;
  if (o3 == 0 && on_seg(q1, q2, p1)) return true;
  if (o4 == 0 && on_seg(q1, q2, p2)) return true;
  return false;
}

double segment_segment_distance(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  if (segments_intersect(p1, p2, q1, q2)) return 0.0;
  return std::min(std::min(segment_point_distance(p1, p2, q1),
                           segment_point_distance(p1, p2, q2)),
                  std::min(segment_point_distance(q1, q2, p1),
                           segment_point_distance(q1, q2, p2)));
}

bool segment_intersects_aabb(Vec2 a, Vec2 b, const Aabb& r) {
  if (r.contains(a) || r.contains(b)) return true;
  const std::array<Vec2, 4> c{{{r.xmin, r.ymin}, {r.xmax, r.ymin},
                               {r.xmax, r.ymax}, {r.xmin, r.ymax}}};
  for (int i = 0; i < 4; ++i) {
    if (segments_intersect(a, b, c[static_cast<size_t>(i)], c[static_cast<size_t>((i + 1) % 4)])) return true;
  }
  return false;
}

double segment_aabb_distance(Vec2 a, Vec2 b, const Aabb& r) {
  if (segment_intersects_aabb(a, b, r)) return 0.0;
  const std::array<Vec2, 4> c{{{r.xmin, r.ymin}, {r.xmax, r.ymin},
                               {r.xmax, r.ymax}, {r.xmin, r.ymax}}};
  double best = segment_point_distance(a, b, c[0]);
  for (int i = 0; i < 4; ++i) {
    best = std::min(best, segment_segment_distance(a, b, c[static_cast<size_t>(i)],
                                                   c[static_cast<size_t>((i + 1) % 4)]));
  }
  return best;
}

double polyline_length(std::span<const Vec2> pts) {
  double sum = 0.0;
  for (size_t i = 1; i < pts.size(); ++i) sum += distance(pts[i - 1], pts[i]);
  return sum;
}

double point_polyline_distance(Vec2 p, std::span<const Vec2> pts) {
  if (pts.empty()) return 0.0;
  if (pts.size() == 1) return distance(p, pts[0]);
  double best = distance(p, pts[0]);
  for (size_t i = 1; i < pts.size(); ++i) {
    best = std::min(best, segment_point_distance(pts[i - 1], pts[i], p));
  }
  return best;
}

}  // namespace mgmm
