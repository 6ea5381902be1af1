#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

namespace cat0 {

inline constexpr double k_pi = 3.14159265358979323846;

// Default absolute tolerance for geometric comparisons (lengths, angles).
inline constexpr double k_eps = 1e-9;

// Tolerance for planar layout identities, where everything is a handful of
// exact arithmetic operations away from the inputs.
inline constexpr double k_layout_eps = 1e-12;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator-() const { return {-x, -y}; }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::sqrt(norm2(a)); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

Vec2 normalized(Vec2 v);

// Unit vector at `angle` radians counterclockwise from +x.
inline Vec2 unit_dir(double angle) { return {std::cos(angle), std::sin(angle)}; }
inline double angle_of(Vec2 v) { return std::atan2(v.y, v.x); }

inline Vec2 rotated(Vec2 v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

// Counterclockwise angle from `a` to `b` in [0, 2pi).
double ccw_angle(Vec2 a, Vec2 b);
// Unsigned angle between directions, in [0, pi].
double angle_between(Vec2 a, Vec2 b);

// Planar isometry x -> M x + t, where M is orthogonal (rotation or
// reflection).  Gluing maps across edges are reflections half the time, so the
// full orthogonal group is kept around rather than rotation-only transforms.
struct Iso2 {
  double m00 = 1.0, m01 = 0.0;
  double m10 = 0.0, m11 = 1.0;
  Vec2 t;

  Vec2 apply(Vec2 p) const { return {m00 * p.x + m01 * p.y + t.x, m10 * p.x + m11 * p.y + t.y}; }
  Vec2 apply_dir(Vec2 d) const { return {m00 * d.x + m01 * d.y, m10 * d.x + m11 * d.y}; }
  double det() const { return m00 * m11 - m01 * m10; }

  static Iso2 identity() { return {}; }
  // a.after(b): apply b first, then a.
  Iso2 after(const Iso2& b) const;
  Iso2 inverse() const;
};

// The isometry sending segment (p0, p1) onto (q0, q1); |p1-p0| and |q1-q0|
// must agree.  Two isometries do the job (mirror images); `keep_left` picks
// whether points on the left of p0->p1 stay on the left of q0->q1.
Iso2 map_segment(Vec2 p0, Vec2 p1, Vec2 q0, Vec2 q1, bool keep_left);

// Angle opposite to side `opp` in a triangle with sides (opp, s1, s2), by the
// law of cosines.  Throws Errc::triangle_inequality when no such triangle
// exists (beyond k_eps slack).
double angle_from_sides(double opp, double s1, double s2);

// Planar coordinates of a triangle with side lengths ab, bc, ca:
// A = origin, B = (ab, 0), C in the upper half plane.
std::array<Vec2, 3> triangle_frame(double ab, double bc, double ca);

// First hit of ray origin+t*d (t >= 0) against segment a..b.  Returns the ray
// parameter t and writes the segment parameter to `s_out` when non-null.
// Near-parallel configurations (|cross| below tol * scale) return nullopt.
std::optional<double> ray_segment_hit(Vec2 origin, Vec2 d, Vec2 a, Vec2 b,
                                      double* s_out = nullptr, double tol = 1e-14);

// Intersection parameter of segment p..q with the full line through a and b,
// as the parameter s along p..q (0 = p).  nullopt when parallel.
std::optional<double> segment_line_param(Vec2 p, Vec2 q, Vec2 a, Vec2 b, double tol = 1e-14);

double dist_point_segment(Vec2 p, Vec2 a, Vec2 b);

// Convex hull in counterclockwise order; collinear points are dropped.
std::vector<Vec2> convex_hull(std::vector<Vec2> pts);

// Signed check with tolerance in absolute units: > tol inside, < -tol outside.
bool point_in_convex_polygon(const std::vector<Vec2>& poly, Vec2 p, double tol);

}  // namespace cat0
