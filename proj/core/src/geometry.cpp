#include "cat0/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "cat0/errors.hpp"

namespace cat0 {

Vec2 normalized(Vec2 v) {
  const double n = norm(v);
  if (n == 0.0) fail(Errc::domain_error, "cannot normalize the zero vector");
  return {v.x / n, v.y / n};
}

double ccw_angle(Vec2 a, Vec2 b) {
  double ang = std::atan2(cross(a, b), dot(a, b));
  if (ang < 0) ang += 2 * k_pi;
  return ang;
}

double angle_between(Vec2 a, Vec2 b) {
  return std::atan2(std::fabs(cross(a, b)), dot(a, b));
}

Iso2 Iso2::after(const Iso2& b) const {
  Iso2 r;
  r.m00 = m00 * b.m00 + m01 * b.m10;
  r.m01 = m00 * b.m01 + m01 * b.m11;
  r.m10 = m10 * b.m00 + m11 * b.m10;
  r.m11 = m10 * b.m01 + m11 * b.m11;
  r.t = apply(b.t);
  return r;
}

Iso2 Iso2::inverse() const {
  // Orthogonal matrix: inverse of M is its transpose.
  Iso2 r;
  r.m00 = m00;
  r.m01 = m10;
  r.m10 = m01;
  r.m11 = m11;
  r.t = -r.apply_dir(t);
  return r;
}

Iso2 map_segment(Vec2 p0, Vec2 p1, Vec2 q0, Vec2 q1, bool keep_left) {
  const Vec2 u = normalized(p1 - p0);
  const Vec2 v = normalized(q1 - q0);
  // Rotation sending u to v.
  const double c = dot(u, v), s = cross(u, v);
  Iso2 r;
  r.m00 = c;
  r.m01 = -s;
  r.m10 = s;
  r.m11 = c;
  if (!keep_left) {
    // Compose with the reflection across the line through p0 along u,
    // expressed in the u frame: M -> M * H where H flips the u-normal.
    const double h00 = u.x * u.x - u.y * u.y;
    const double h01 = 2 * u.x * u.y;
    Iso2 m = r;
    r.m00 = m.m00 * h00 + m.m01 * h01;
    r.m01 = m.m00 * h01 - m.m01 * h00;
    r.m10 = m.m10 * h00 + m.m11 * h01;
    r.m11 = m.m10 * h01 - m.m11 * h00;
  }
  r.t = q0 - r.apply_dir(p0);
  return r;
}

double angle_from_sides(double opp, double s1, double s2) {
  if (s1 <= 0 || s2 <= 0) fail(Errc::domain_error, "triangle side lengths must be positive");
  double c = (s1 * s1 + s2 * s2 - opp * opp) / (2 * s1 * s2);
  if (c > 1 + k_eps || c < -1 - k_eps)
    fail(Errc::triangle_inequality, "side lengths violate the triangle inequality");
  c = std::clamp(c, -1.0, 1.0);
  return std::acos(c);
}

std::array<Vec2, 3> triangle_frame(double ab, double bc, double ca) {
  const double alpha = angle_from_sides(bc, ab, ca);  // angle at A
  return {Vec2{0, 0}, Vec2{ab, 0}, Vec2{ca * std::cos(alpha), ca * std::sin(alpha)}};
}

std::optional<double> ray_segment_hit(Vec2 origin, Vec2 d, Vec2 a, Vec2 b, double* s_out,
                                      double tol) {
  const Vec2 e = b - a;
  const double denom = cross(d, e);
  const double scale = std::max(norm(d) * norm(e), 1e-300);
  if (std::fabs(denom) <= tol * scale) return std::nullopt;
  const Vec2 w = a - origin;
  const double t = cross(w, e) / denom;
  const double s = cross(w, d) / denom;
  if (t < 0 || s < 0 || s > 1) return std::nullopt;
  if (s_out != nullptr) *s_out = s;
  return t;
}

std::optional<double> segment_line_param(Vec2 p, Vec2 q, Vec2 a, Vec2 b, double tol) {
  const Vec2 d = q - p;
  const Vec2 e = b - a;
  const double denom = cross(d, e);
  const double scale = std::max(norm(d) * norm(e), 1e-300);
  if (std::fabs(denom) <= tol * scale) return std::nullopt;
  return cross(a - p, e) / denom;
}

double dist_point_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 e = b - a;
  const double len2 = norm2(e);
  if (len2 == 0.0) return dist(p, a);
  const double t = std::clamp(dot(p - a, e) / len2, 0.0, 1.0);
  return dist(p, a + t * e);
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  const size_t n = pts.size();
  if (n < 3) return pts;
  std::vector<Vec2> h(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {  // lower
    while (k >= 2 && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (size_t i = n - 1, lo = k + 1; i-- > 0;) {  // upper
    while (k >= lo && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

bool point_in_convex_polygon(const std::vector<Vec2>& poly, Vec2 p, double tol) {
  const size_t n = poly.size();
  if (n == 0) return false;
  if (n == 1) return dist(p, poly[0]) <= tol;
  if (n == 2) return dist_point_segment(p, poly[0], poly[1]) <= tol;
  for (size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % n];
    if (cross(b - a, p - a) < -tol * norm(b - a)) return false;
  }
  return true;
}

}  // namespace cat0
