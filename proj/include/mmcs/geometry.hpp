#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>

namespace mmcs {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Box3 = Eigen::AlignedBox3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

// Wraps an angle to [-pi, pi).
inline double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0) a += 2.0 * kPi;
  return a - kPi;
}

// Wraps x into [lo, hi) (toroidal coordinate).
inline double wrap_coord(double x, double lo, double hi) {
  const double w = hi - lo;
  double r = std::fmod(x - lo, w);
  if (r < 0) r += w;
  return lo + r;
}

struct Rect {
  double xmin = 0, ymin = 0, xmax = 0, ymax = 0;
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
  bool contains(const Vec2& p) const {
    return p.x() >= xmin && p.x() <= xmax && p.y() >= ymin && p.y() <= ymax;
  }
};

namespace detail {
// Parametric overlap of segment a+(b-a)t with a slab interval per axis.
// Returns false as soon as the running [tmin, tmax] interval empties.
inline bool slab_clip(double a, double d, double lo, double hi, double& tmin, double& tmax) {
  constexpr double eps = 1e-12;
  if (std::abs(d) < eps) return a > lo && a < hi;  // parallel: grazing the face does not block
  double t0 = (lo - a) / d;
  double t1 = (hi - a) / d;
  if (t0 > t1) std::swap(t0, t1);
  tmin = std::max(tmin, t0);
  tmax = std::min(tmax, t1);
  return tmin < tmax;
}
}  // namespace detail

// True iff the open segment (a, b) passes through the interior of `box`.
// Touching a face or corner at a single point does not count.
inline bool segment_intersects_box(const Vec3& a, const Vec3& b, const Box3& box) {
  const Vec3 d = b - a;
  double tmin = 0.0, tmax = 1.0;
  for (int ax = 0; ax < 3; ++ax) {
    if (!detail::slab_clip(a[ax], d[ax], box.min()[ax], box.max()[ax], tmin, tmax)) return false;
  }
  return tmax - tmin > 1e-9;
}

// Footprint-extruded upright box with the length axis along `heading`.
struct ObbXY {
  Vec2 center;
  double cos_h = 1.0, sin_h = 0.0;  // heading direction cosines
  double half_length = 0.5;         // along heading
  double half_width = 0.5;          // across heading
  double height = 1.0;              // extrusion from z=0
  double cull_radius2 = 0.0;        // squared footprint circumradius

  void update_cull_radius() {
    cull_radius2 = half_length * half_length + half_width * half_width;
  }
};

// Squared distance from point p to segment (a, b), all in the xy plane.
inline double point_segment_dist2_2d(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  double t = len2 > 0 ? (p - a).dot(d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * d)).squaredNorm();
}

inline bool segment_intersects_obb(const Vec3& a, const Vec3& b, const ObbXY& o) {
  // Cheap 2D reject first; obstacles are small relative to ray lengths.
  if (point_segment_dist2_2d(o.center, Vec2(a.x(), a.y()), Vec2(b.x(), b.y())) > o.cull_radius2)
    return false;
  // Rotate into the obstacle frame (length axis = local x) and run the slab test.
  auto to_local = [&](const Vec3& p) {
    const double dx = p.x() - o.center.x();
    const double dy = p.y() - o.center.y();
    return Vec3(o.cos_h * dx + o.sin_h * dy, -o.sin_h * dx + o.cos_h * dy, p.z());
  };
  const Vec3 la = to_local(a);
  const Vec3 lb = to_local(b);
  const Box3 local(Vec3(-o.half_length, -o.half_width, 0.0),
                   Vec3(o.half_length, o.half_width, o.height));
  return segment_intersects_box(la, lb, local);
}

// Mirror image of p across the axis-aligned plane {x[axis] = coord}.
inline Vec3 mirror_across_plane(const Vec3& p, int axis, double coord) {
  Vec3 q = p;
  q[axis] = 2.0 * coord - p[axis];
  return q;
}

}  // namespace mmcs
