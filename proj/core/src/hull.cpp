#include "cat0/hull.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include "cat0/errors.hpp"
#include "cat0/log.hpp"

namespace cat0 {

namespace {

constexpr double k_tie_tol = 1e-9;

// Directions within k_eps of a bounding ray count as that ray, so later
// stages never see sliver cones.
LinkPoint snapped_dir(const SingleVertexComplex& c, const ConePoint& p) {
  if (p.direction.is_node()) return p.direction;
  const auto& cn = c.cones[p.direction.arc];
  double off = std::clamp(p.direction.offset, 0.0, cn.angle);
  if (off <= k_eps) return LinkPoint::at_node(cn.r0);
  if (off >= cn.angle - k_eps) return LinkPoint::at_node(cn.r1);
  return LinkPoint::on_arc(p.direction.arc, off);
}

std::vector<ConePoint> snapped_points(const SingleVertexComplex& c,
                                      const std::vector<ConePoint>& pts) {
  std::vector<ConePoint> out;
  out.reserve(pts.size());
  for (const auto& p : pts) {
    validate_point(c, p);
    if (p.origin) {
      out.push_back(ConePoint::at_origin());
    } else {
      out.push_back({false, snapped_dir(c, p), p.radius});
    }
  }
  return out;
}

bool is_cube_complex(const SingleVertexComplex& c) {
  if (c.cones.empty()) return false;
  for (const auto& cn : c.cones)
    if (std::fabs(cn.angle - k_pi / 2) > k_eps) return false;
  return true;
}

AugmentedComplex identity_augmentation(const SingleVertexComplex& c,
                                       const std::vector<ConePoint>& pts) {
  AugmentedComplex ac;
  ac.cx = c;
  ac.ray_orig.resize(c.ray_ids.size());
  std::iota(ac.ray_orig.begin(), ac.ray_orig.end(), 0);
  ac.cone_orig.resize(c.cones.size());
  std::iota(ac.cone_orig.begin(), ac.cone_orig.end(), 0);
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    const auto& p = pts[i];
    if (p.origin) {
      ac.has_origin_point = true;
    } else if (p.direction.is_node()) {
      ac.points.push_back({p.direction.node, p.radius, i});
    }
  }
  return ac;
}

// One pair constraint in the plain form  y_ell <= cf*y_f + ce*y_e + rhs.
// e/f are variable columns (-1 when the term is absent); the rational twins
// are only meaningful on the cube path.
struct RowBuf {
  int ell = -1;
  int e = -1, f = -1;
  double gamma1 = 0.0, gamma2 = 0.0;
  double cf = 0.0, ce = 0.0, rhs = 0.0;
  Rational rcf = 0, rce = 0, rrhs = 0;
};

struct SineRow {
  int ell = -1, e = -1, f = -1;
  double g1 = 0.0, g2 = 0.0;
};

// Every (tied) shortest link path below pi between two support rays crosses
// the interior rays at fixed cumulative angles; those angles are the whole
// geometric content of the pair constraints.
std::vector<SineRow> enumerate_sine_rows(const SingleVertexComplex& cx,
                                         const std::vector<int>& support) {
  std::vector<char> in_support(cx.link.node_ids.size(), 0);
  for (int r : support) in_support[r] = 1;
  std::vector<SineRow> rows;
  std::set<std::tuple<int, int, int, long long>> seen;
  for (size_t i = 0; i < support.size(); ++i) {
    for (size_t j = i + 1; j < support.size(); ++j) {
      const int e = support[i], f = support[j];
      auto paths = all_shortest_link_paths(cx.link, LinkPoint::at_node(e),
                                           LinkPoint::at_node(f), k_pi + 1e-6, k_tie_tol, 64);
      if (paths.empty() || paths.front().length >= k_pi - k_eps) continue;
      for (const auto& path : paths) {
        double cum = 0.0;
        for (size_t t = 0; t + 1 < path.nodes.size(); ++t) {
          cum += cx.link.arcs[path.arcs[t]].w;
          if (t + 2 == path.nodes.size()) break;  // arrived at f
          const int ell = path.nodes[t + 1];
          if (!in_support[ell]) continue;  // closure includes these; be safe
          const double g1 = cum, g2 = path.length - cum;
          if (g1 <= k_eps || g2 <= k_eps) continue;
          auto key = std::make_tuple(ell, e, f, std::llround(g1 * 1e12));
          if (seen.insert(key).second) rows.push_back({ell, e, f, g1, g2});
        }
      }
    }
  }
  return rows;
}

// Materialize the LP (and its provenance) from neutral row buffers.  In the
// paired layout columns [0,k) are y^max and [k,2k) y^min; every buffer row
// becomes a <= row on the max block and a >= row on the min block, and each
// variable gets the coupling row y^min - y^max >= 0 (not recorded in the
// provenance list, which keeps the plain form only).
HullLP finalize_lp(std::vector<int> vars, const std::vector<RowBuf>& bufs, bool paired,
                   bool rational) {
  HullLP h;
  h.paired = paired;
  h.rational = rational;
  h.vars = std::move(vars);
  const int k = static_cast<int>(h.vars.size());
  const int n = paired ? 2 * k : k;

  h.lp.nvars = n;
  h.lp.c.assign(n, 1.0);
  if (paired)
    for (int i = 0; i < k; ++i) h.lp.c[k + i] = -1.0;
  if (rational) {
    h.lp_exact.emplace();
    h.lp_exact->nvars = n;
    h.lp_exact->c.assign(n, Rational(1));
    if (paired)
      for (int i = 0; i < k; ++i) h.lp_exact->c[k + i] = Rational(-1);
  }

  auto add = [&](const RowBuf& b, bool min_side) {
    const int off = min_side ? k : 0;
    const Rel rel = min_side ? Rel::ge : Rel::le;
    std::vector<double> a(n, 0.0);
    a[off + b.ell] += 1.0;
    if (b.f >= 0) a[off + b.f] -= b.cf;
    if (b.e >= 0) a[off + b.e] -= b.ce;
    h.lp.add_row(std::move(a), rel, b.rhs);
    if (rational) {
      std::vector<Rational> ra(n, Rational(0));
      ra[off + b.ell] += 1;
      if (b.f >= 0) ra[off + b.f] -= b.rcf;
      if (b.e >= 0) ra[off + b.e] -= b.rce;
      h.lp_exact->add_row(std::move(ra), rel, b.rrhs);
    }
  };

  for (const auto& b : bufs) {
    add(b, false);
    if (paired) add(b, true);
    h.rows.push_back({h.vars[b.ell], b.e >= 0 ? h.vars[b.e] : -1, b.f >= 0 ? h.vars[b.f] : -1,
                      b.gamma1, b.gamma2, b.cf, b.ce, b.rhs});
  }
  if (paired) {
    for (int i = 0; i < k; ++i) {
      std::vector<double> a(n, 0.0);
      a[k + i] = 1.0;
      a[i] = -1.0;
      h.lp.add_row(std::move(a), Rel::ge, 0.0);
      if (rational) {
        std::vector<Rational> ra(n, Rational(0));
        ra[k + i] = 1;
        ra[i] = -1;
        h.lp_exact->add_row(std::move(ra), Rel::ge, Rational(0));
      }
    }
  }
  return h;
}

std::vector<RowBuf> float_rows(const AugmentedComplex& ac, const std::vector<int>& support) {
  std::vector<int> col(ac.cx.ray_ids.size(), -1);
  for (size_t i = 0; i < support.size(); ++i) col[support[i]] = static_cast<int>(i);

  std::vector<RowBuf> bufs;
  for (const auto& p : ac.points) {
    if (col[p.ray] < 0) continue;
    RowBuf b;
    b.ell = col[p.ray];
    b.rhs = 1.0 / p.radius;
    bufs.push_back(b);
  }
  for (const auto& s : enumerate_sine_rows(ac.cx, support)) {
    const double denom = std::sin(s.g1 + s.g2);
    RowBuf b;
    b.ell = col[s.ell];
    b.e = col[s.e];
    b.f = col[s.f];
    b.gamma1 = s.g1;
    b.gamma2 = s.g2;
    b.cf = std::sin(s.g1) / denom;
    b.ce = std::sin(s.g2) / denom;
    bufs.push_back(b);
  }
  return bufs;
}

}  // namespace

AugmentedComplex augment(const SingleVertexComplex& c, const std::vector<ConePoint>& pts) {
  AugmentedComplex ac;

  struct Dir {
    double offset = 0.0;
    std::vector<std::pair<int, double>> pts;  // (source index, radius)
  };
  std::vector<std::vector<Dir>> per_cone(c.cones.size());
  struct OnRay {
    int ray = -1;
    double radius = 0.0;
    int source = -1;
  };
  std::vector<OnRay> on_ray;

  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    const auto& p = pts[i];
    validate_point(c, p);
    if (p.origin) {
      ac.has_origin_point = true;
      continue;
    }
    const LinkPoint d = snapped_dir(c, p);
    if (d.is_node()) {
      on_ray.push_back({d.node, p.radius, i});
      continue;
    }
    auto& dirs = per_cone[d.arc];
    bool merged = false;
    for (auto& dir : dirs) {
      if (std::fabs(dir.offset - d.offset) <= k_layout_eps) {
        dir.pts.push_back({i, p.radius});
        merged = true;
        break;
      }
    }
    if (!merged) dirs.push_back({d.offset, {{i, p.radius}}});
  }

  std::vector<std::string> ray_ids = c.ray_ids;
  std::set<std::string> ray_taken(ray_ids.begin(), ray_ids.end());
  ac.ray_orig.resize(ray_ids.size());
  std::iota(ac.ray_orig.begin(), ac.ray_orig.end(), 0);

  std::set<std::string> cone_taken;
  for (const auto& cn : c.cones) cone_taken.insert(cn.id);

  std::vector<ConeSpec> specs;
  for (int ci = 0; ci < static_cast<int>(c.cones.size()); ++ci) {
    const auto& cn = c.cones[ci];
    auto dirs = per_cone[ci];
    std::sort(dirs.begin(), dirs.end(),
              [](const Dir& a, const Dir& b) { return a.offset < b.offset; });
    if (dirs.empty()) {
      specs.push_back({cn.id, ray_ids[cn.r0], ray_ids[cn.r1], cn.angle});
      ac.cone_orig.push_back(ci);
      continue;
    }
    std::vector<int> dir_rays;
    for (size_t k = 0; k < dirs.size(); ++k) {
      std::string id = cn.id + "@" + std::to_string(k);
      while (!ray_taken.insert(id).second) id += "'";
      const int slot = static_cast<int>(ray_ids.size());
      ray_ids.push_back(id);
      ac.ray_orig.push_back(-1);
      ac.inserted.push_back({slot, ci, dirs[k].offset});
      for (auto [src, r] : dirs[k].pts) ac.points.push_back({slot, r, src});
      dir_rays.push_back(slot);
    }
    double prev = 0.0;
    int prev_ray = cn.r0;
    for (size_t k = 0; k <= dirs.size(); ++k) {
      const double hi = k == dirs.size() ? cn.angle : dirs[k].offset;
      const int hi_ray = k == dirs.size() ? cn.r1 : dir_rays[k];
      std::string id = cn.id + "#" + std::to_string(k);
      while (!cone_taken.insert(id).second) id += "'";
      specs.push_back({id, ray_ids[prev_ray], ray_ids[hi_ray], hi - prev});
      ac.cone_orig.push_back(ci);
      prev = hi;
      prev_ray = hi_ray;
    }
  }
  for (const auto& o : on_ray) ac.points.push_back({o.ray, o.radius, o.source});
  std::sort(ac.points.begin(), ac.points.end(),
            [](const AugmentedComplex::RayPoint& a, const AugmentedComplex::RayPoint& b) {
              return a.source < b.source;
            });

  ac.cx = build_single_vertex(ray_ids, specs);
  return ac;
}

double crossing_formula(double x_e, double x_f, double gamma1, double gamma2) {
  if (!(x_e > 0.0) || !(x_f > 0.0))
    fail(Errc::domain_error, "crossing_formula: radii must be positive");
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0) || !(gamma1 + gamma2 < k_pi))
    fail(Errc::domain_error, "crossing_formula: need gamma1, gamma2 > 0, gamma1 + gamma2 < pi");
  return x_e * x_f * std::sin(gamma1 + gamma2) /
         (x_e * std::sin(gamma1) + x_f * std::sin(gamma2));
}

HullLP build_lp_origin_inside(const AugmentedComplex& ac, const std::vector<int>& support) {
  return finalize_lp(support, float_rows(ac, support), false, false);
}

HullLP build_lp_origin_outside(const AugmentedComplex& ac, const std::vector<int>& support) {
  return finalize_lp(support, float_rows(ac, support), true, false);
}

HullLP build_lp_cube(const SingleVertexComplex& c, const std::vector<ConePoint>& pts,
                     const std::vector<int>& support, bool origin_inside,
                     const HullOptions& opt) {
  std::vector<int> col(c.ray_ids.size(), -1);
  for (size_t i = 0; i < support.size(); ++i) col[support[i]] = static_cast<int>(i);

  // Elements: the non-origin points of P with exact quadrant data, then one
  // variable per support ray.
  struct Elem {
    bool var = false;
    int column = -1;     // var
    bool on_ray = false; // point on a ray
    Rational radius = 0; // on-ray point
    int cone = -1;       // interior point
    Rational h = 0, v = 0;
    LinkPoint dir;
  };
  std::vector<Elem> elems;
  for (size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    if (p.origin) continue;
    Elem el;
    el.dir = snapped_dir(c, p);
    if (el.dir.is_node()) {
      el.on_ray = true;
      el.radius = Rational(p.radius);
    } else {
      el.cone = el.dir.arc;
      if (i < opt.exact_uv.size() && opt.exact_uv[i]) {
        el.h = opt.exact_uv[i]->first;
        el.v = opt.exact_uv[i]->second;
      } else {
        el.h = Rational(p.radius * std::cos(el.dir.offset));
        el.v = Rational(p.radius * std::sin(el.dir.offset));
      }
      if (el.v <= 0) {
        el.on_ray = true;
        el.dir = LinkPoint::at_node(c.cones[el.cone].r0);
        el.radius = el.h;
      } else if (el.h <= 0) {
        el.on_ray = true;
        el.dir = LinkPoint::at_node(c.cones[el.cone].r1);
        el.radius = el.v;
      }
    }
    elems.push_back(std::move(el));
  }
  for (int r : support) {
    Elem el;
    el.var = true;
    el.column = col[r];
    el.dir = LinkPoint::at_node(r);
    elems.push_back(std::move(el));
  }

  std::vector<RowBuf> bufs;
  auto push = [&](RowBuf b) {
    b.cf = b.rcf.convert_to<double>();
    b.ce = b.rce.convert_to<double>();
    b.rhs = b.rrhs.convert_to<double>();
    bufs.push_back(std::move(b));
  };

  for (const auto& el : elems) {
    if (!el.var && el.on_ray && col[el.dir.node] >= 0 && el.radius > 0) {
      RowBuf b;
      b.ell = col[el.dir.node];
      b.rrhs = Rational(1) / el.radius;
      push(std::move(b));
    }
  }

  // A point adjacent to a crossed ray, as (distance across, distance along).
  auto side_coords = [&](const Elem& el, int node) -> std::optional<std::pair<Rational, Rational>> {
    if (el.on_ray) return std::make_pair(el.radius, Rational(0));
    const auto& cn = c.cones[el.cone];
    if (node == cn.r1) return std::make_pair(el.h, el.v);
    if (node == cn.r0) return std::make_pair(el.v, el.h);
    return std::nullopt;
  };

  for (size_t i = 0; i < elems.size(); ++i) {
    for (size_t j = i + 1; j < elems.size(); ++j) {
      const Elem& A = elems[i];
      const Elem& B = elems[j];
      if (A.var && B.var) continue;  // pi apart whenever something lies between
      auto paths =
          all_shortest_link_paths(c.link, A.dir, B.dir, k_pi + 1e-6, k_tie_tol, 64);
      if (paths.empty() || paths.front().length >= k_pi - k_eps) continue;
      for (const auto& path : paths) {
        if (path.nodes.empty()) continue;  // same cone
        size_t lo = A.dir.is_node() ? 1 : 0;
        size_t hi = path.nodes.size() - (B.dir.is_node() ? 1 : 0);
        if (lo >= hi) continue;
        const size_t k = hi - lo;  // crossed rays
        if (k == 1) {
          const int ell = path.nodes[lo];
          if (col[ell] < 0) continue;
          if (A.var || B.var) {
            const Elem& pt = A.var ? B : A;
            const Elem& var = A.var ? A : B;
            auto pc = side_coords(pt, ell);
            if (!pc || pc->second <= 0) continue;
            RowBuf b;
            b.ell = col[ell];
            b.f = var.column;
            b.rcf = pc->first / pc->second;
            b.rrhs = Rational(1) / pc->second;
            push(std::move(b));
          } else {
            auto pa = side_coords(A, ell);
            auto pb = side_coords(B, ell);
            if (!pa || !pb) continue;
            const Rational num = pa->second * pb->first + pb->second * pa->first;
            const Rational den = pa->first + pb->first;
            if (num <= 0 || den <= 0) continue;
            RowBuf b;
            b.ell = col[ell];
            b.rrhs = den / num;  // 1/t
            push(std::move(b));
          }
        } else if (k == 2) {
          if (A.var || B.var || A.on_ray || B.on_ray) continue;  // cannot reach < pi
          const int l1 = path.nodes[lo], l2 = path.nodes[lo + 1];
          auto pa = side_coords(A, l1);
          auto pb = side_coords(B, l2);
          if (!pa || !pb) continue;
          const Rational d = pa->second * pb->second - pa->first * pb->first;
          if (d <= 0) continue;  // the straight segment misses the rays
          if (col[l1] >= 0) {
            RowBuf b;
            b.ell = col[l1];
            b.rrhs = (pa->first + pb->second) / d;
            push(std::move(b));
          }
          if (col[l2] >= 0) {
            RowBuf b;
            b.ell = col[l2];
            b.rrhs = (pa->second + pb->first) / d;
            push(std::move(b));
          }
        }
        // k >= 3 cannot stay below pi in a right-angled link.
      }
    }
  }
  return finalize_lp(support, bufs, !origin_inside, true);
}

namespace {

// Cell polygons live in original-cone coordinates (first ray along +x).
void assemble_cells(const SingleVertexComplex& c, const std::vector<ConePoint>& pts,
                    HullResult& res) {
  std::vector<std::vector<Vec2>> cell_pts(c.cones.size());
  auto add_on_ray = [&](int ray, double r) {
    for (int ci = 0; ci < static_cast<int>(c.cones.size()); ++ci) {
      const auto& cn = c.cones[ci];
      if (cn.r0 == ray) cell_pts[ci].push_back({r, 0.0});
      if (cn.r1 == ray) cell_pts[ci].push_back(r * unit_dir(cn.angle));
    }
  };

  for (const auto& cr : res.crossings) {
    const int orig = res.aug.ray_orig[cr.ray];
    if (orig >= 0) {
      add_on_ray(orig, cr.x_max);
      if (!res.origin_in_hull) add_on_ray(orig, cr.x_min);
    } else {
      for (const auto& ins : res.aug.inserted) {
        if (ins.ray != cr.ray) continue;
        cell_pts[ins.orig_cone].push_back(cr.x_max * unit_dir(ins.offset));
        if (!res.origin_in_hull) cell_pts[ins.orig_cone].push_back(cr.x_min * unit_dir(ins.offset));
      }
    }
  }
  for (const auto& p : pts) {
    if (p.origin) continue;
    if (p.direction.is_node())
      add_on_ray(p.direction.node, p.radius);
    else
      cell_pts[p.direction.arc].push_back(p.radius * unit_dir(p.direction.offset));
  }
  if (res.origin_in_hull) {
    for (auto& v : cell_pts)
      if (!v.empty()) v.push_back({0.0, 0.0});
  }
  for (int ci = 0; ci < static_cast<int>(c.cones.size()); ++ci) {
    if (cell_pts[ci].empty()) continue;
    res.cells.push_back({ci, convex_hull(std::move(cell_pts[ci]))});
  }
}

// Where q lives: (original cone, cone-local coordinates), twice for on-ray
// points with two incident cones.
std::vector<std::pair<int, Vec2>> placements(const SingleVertexComplex& c, const ConePoint& q) {
  std::vector<std::pair<int, Vec2>> out;
  if (q.origin) return out;
  const LinkPoint d = snapped_dir(c, q);
  if (d.is_node()) {
    for (int ci = 0; ci < static_cast<int>(c.cones.size()); ++ci) {
      const auto& cn = c.cones[ci];
      if (cn.r0 == d.node) out.push_back({ci, {q.radius, 0.0}});
      if (cn.r1 == d.node) out.push_back({ci, q.radius * unit_dir(cn.angle)});
    }
  } else {
    out.push_back({d.arc, q.radius * unit_dir(d.offset)});
  }
  return out;
}

// Does the polygon cover a (page-relative) neighbourhood of p?  Edges lying
// entirely on one of the `spine` lines through O are not hull boundary from
// this page's point of view: the complex continues across them.
bool page_covers(const std::vector<Vec2>& poly, Vec2 p, const std::vector<Vec2>& spines) {
  if (poly.size() < 3) return false;
  if (!point_in_convex_polygon(poly, p, k_eps)) return false;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
    bool on_spine = false;
    for (const Vec2& d : spines) {
      if (std::fabs(cross(d, a)) <= k_eps && std::fabs(cross(d, b)) <= k_eps) {
        on_spine = true;
        break;
      }
    }
    if (!on_spine && dist_point_segment(p, a, b) <= k_eps) return false;
  }
  return true;
}

const std::vector<Vec2>* cell_polygon(const HullResult& h, int cone) {
  for (const auto& cell : h.cells)
    if (cell.cone == cone) return &cell.polygon;
  return nullptr;
}

bool origin_is_interior(const SingleVertexComplex& c, const HullResult& h) {
  if (!h.origin_in_hull) return false;
  for (int ci = 0; ci < static_cast<int>(c.cones.size()); ++ci) {
    const auto* poly = cell_polygon(h, ci);
    if (!poly) return false;
    const std::vector<Vec2> spines = {{1.0, 0.0}, unit_dir(c.cones[ci].angle)};
    if (!page_covers(*poly, {0.0, 0.0}, spines)) return false;
  }
  return true;
}

}  // namespace

HullResult solve_hull(const SingleVertexComplex& c, const std::vector<ConePoint>& pts,
                      const HullOptions& opt) {
  if (pts.empty()) fail(Errc::domain_error, "solve_hull needs at least one point");
  const bool rational = opt.arith == HullOptions::Arith::rational;
  if (rational && !is_cube_complex(c))
    fail(Errc::domain_error, "rational hulls require a cube complex (every cone pi/2)");

  const std::vector<ConePoint> snapped = snapped_points(c, pts);

  HullResult res;
  auto origin = origin_in_hull(c, snapped);
  res.origin_in_hull = origin.in_hull;
  res.witness = origin.witness;

  int non_origin = 0;
  for (const auto& p : snapped)
    if (!p.origin) ++non_origin;

  if (non_origin == 0) {  // hull = {O}
    res.aug = identity_augmentation(c, snapped);
    return res;
  }

  if (snapped.size() == 1) {  // hull = {p}, no LP needed
    if (rational) {
      res.aug = identity_augmentation(c, snapped);
      res.support = hull_edge_support(c, snapped);
      res.exact_x.emplace();
    } else {
      res.aug = augment(c, snapped);
      std::vector<ConePoint> on_rays;
      for (const auto& rp : res.aug.points) on_rays.push_back(ConePoint::on_ray(rp.ray, rp.radius));
      res.support = hull_edge_support(res.aug.cx, on_rays);
    }
    for (int ray : res.support) {
      res.crossings.push_back(
          {ray, res.aug.cx.ray_ids[ray], snapped[0].radius, snapped[0].radius});
      if (res.exact_x) res.exact_x->push_back(Rational(snapped[0].radius));
    }
    assemble_cells(c, snapped, res);
    return res;
  }

  if (rational) {
    res.aug = identity_augmentation(c, snapped);
    res.support = hull_edge_support(c, snapped);
    res.lp = build_lp_cube(c, snapped, res.support, res.origin_in_hull, opt);
  } else {
    res.aug = augment(c, snapped);
    std::vector<ConePoint> on_rays;
    for (const auto& rp : res.aug.points) on_rays.push_back(ConePoint::on_ray(rp.ray, rp.radius));
    res.support = hull_edge_support(res.aug.cx, on_rays);
    res.lp = res.origin_in_hull ? build_lp_origin_inside(res.aug, res.support)
                                : build_lp_origin_outside(res.aug, res.support);
  }

  const int k = static_cast<int>(res.lp.vars.size());
  if (k > 0) {
    std::vector<double> y;
    std::vector<Rational> ry;
    LpStatus status;
    if (rational) {
      auto sol = solve_lp(*res.lp.lp_exact);
      status = sol.status;
      res.pivots = sol.pivots;
      ry = std::move(sol.x);
      y.reserve(ry.size());
      for (const auto& v : ry) y.push_back(v.convert_to<double>());
    } else {
      auto sol = solve_lp(res.lp.lp);
      status = sol.status;
      res.pivots = sol.pivots;
      y = std::move(sol.x);
    }
    if (status == LpStatus::infeasible)
      fail(Errc::lp_infeasible, "hull LP infeasible; the closure of the hull should satisfy it");
    if (status == LpStatus::unbounded)
      fail(Errc::lp_unbounded, "hull LP unbounded; some support ray has no cap");

    if (rational) res.exact_x.emplace();
    for (int i = 0; i < k; ++i) {
      const double ymax = y[i];
      if (!(ymax > 1e-12))
        fail(Errc::numerical_breakdown, "hull crossing reciprocal vanished for a bounded hull");
      HullResult::Crossing cr;
      cr.ray = res.lp.vars[i];
      cr.id = res.aug.cx.ray_ids[cr.ray];
      cr.x_max = 1.0 / ymax;
      cr.x_min = res.lp.paired ? 1.0 / y[k + i] : 0.0;
      res.crossings.push_back(std::move(cr));
      if (rational) res.exact_x->push_back(Rational(1) / ry[i]);
    }
  }

  assemble_cells(c, snapped, res);
  return res;
}

bool hull_contains(const SingleVertexComplex& c, const HullResult& h, const ConePoint& q) {
  validate_point(c, q);
  if (q.origin) return h.origin_in_hull;
  for (const auto& [cone, xy] : placements(c, q)) {
    const auto* poly = cell_polygon(h, cone);
    if (poly && point_in_convex_polygon(*poly, xy, k_eps)) return true;
  }
  return false;
}

bool membership(const SingleVertexComplex& c, const std::vector<ConePoint>& pts,
                const ConePoint& q, const HullOptions& opt) {
  return hull_contains(c, solve_hull(c, pts, opt), q);
}

std::vector<char> hull_boundary_points(const SingleVertexComplex& c, const HullResult& h,
                                       const std::vector<ConePoint>& pts) {
  std::vector<char> boundary(pts.size(), 0);
  const bool origin_interior = origin_is_interior(c, h);
  for (size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    if (p.origin) {
      boundary[i] = h.origin_in_hull && !origin_interior;
      continue;
    }
    bool interior = true;
    const ConePoint sp{false, snapped_dir(c, p), p.radius};
    for (const auto& [cone, xy] : placements(c, sp)) {
      const auto* poly = cell_polygon(h, cone);
      if (!poly) {
        interior = false;
        break;
      }
      std::vector<Vec2> spines;
      if (sp.direction.is_node()) {
        // Only the line of p's own ray is shared with the next page.
        const auto& cn = c.cones[cone];
        spines.push_back(cn.r0 == sp.direction.node ? Vec2{1.0, 0.0} : unit_dir(cn.angle));
      }
      if (!page_covers(*poly, xy, spines)) {
        interior = false;
        break;
      }
    }
    boundary[i] = !interior;
  }
  return boundary;
}

OracleResult iterative_hull_oracle(const SingleVertexComplex& c,
                                   const std::vector<ConePoint>& pts, double eps,
                                   int max_rounds) {
  if (!(eps > 0)) fail(Errc::domain_error, "iterative_hull_oracle needs eps > 0");
  if (max_rounds < 1) fail(Errc::domain_error, "iterative_hull_oracle needs max_rounds >= 1");
  const std::vector<ConePoint> snapped = snapped_points(c, pts);

  std::vector<ConePoint> interior;  // fixed participants, off the rays
  std::map<int, double> hi, lo;     // per-ray extreme radii
  for (const auto& p : snapped) {
    if (p.origin) continue;
    if (!p.direction.is_node()) {
      interior.push_back(p);
      continue;
    }
    const int r = p.direction.node;
    auto it = hi.find(r);
    if (it == hi.end()) {
      hi[r] = p.radius;
      lo[r] = p.radius;
    } else {
      it->second = std::max(it->second, p.radius);
      lo[r] = std::min(lo[r], p.radius);
    }
  }

  OracleResult out;
  auto sweep = [&](std::map<int, double>& cur, bool maximize) {
    std::vector<ConePoint> set = interior;
    for (auto [ray, r] : cur) set.push_back(ConePoint::on_ray(ray, r));
    std::map<int, double> next = cur;
    for (size_t i = 0; i < set.size(); ++i) {
      for (size_t j = i + 1; j < set.size(); ++j) {
        auto g = geodesic(c, set[i], set[j]);
        if (g.through_origin) continue;
        for (auto [ray, dist] : g.crossings) {
          auto it = next.find(ray);
          if (it == next.end())
            next[ray] = dist;
          else if (maximize ? dist > it->second : dist < it->second)
            it->second = dist;
        }
      }
    }
    double moved = 0.0;
    for (auto [ray, r] : next) {
      auto it = cur.find(ray);
      moved = std::max(moved, it == cur.end() ? r : std::fabs(r - it->second));
    }
    cur = std::move(next);
    return moved;
  };

  for (int round = 1; round <= max_rounds; ++round) {
    out.rounds = round;
    const double moved = std::max(sweep(hi, true), sweep(lo, false));
    if (moved < eps) {
      out.converged = true;
      break;
    }
  }

  for (auto [ray, r] : hi) {
    auto it = lo.find(ray);
    out.rays.push_back({ray, it == lo.end() ? r : std::min(it->second, r), r});
  }
  return out;
}

PeelResult peel(const SingleVertexComplex& c, const std::vector<ConePoint>& pts,
                const PeelStop& stop, const HullOptions& opt) {
  PeelResult out;
  std::vector<int> remaining(pts.size());
  std::iota(remaining.begin(), remaining.end(), 0);
  const double total = static_cast<double>(pts.size());

  while (!remaining.empty()) {
    if (stop.rounds && static_cast<int>(out.layers.size()) >= *stop.rounds) break;
    std::vector<ConePoint> sub;
    sub.reserve(remaining.size());
    for (int i : remaining) sub.push_back(pts[i]);
    const HullResult h = solve_hull(c, sub, opt);
    const std::vector<char> on_boundary = hull_boundary_points(c, h, sub);

    std::vector<int> layer, rest;
    for (size_t i = 0; i < remaining.size(); ++i)
      (on_boundary[i] ? layer : rest).push_back(remaining[i]);
    if (layer.empty()) break;  // nothing peelable; avoid spinning
    if (stop.fraction &&
        static_cast<double>(rest.size()) < *stop.fraction * total - k_eps)
      break;  // peeling this layer would drop below the floor
    out.layers.push_back(std::move(layer));
    remaining = std::move(rest);
  }
  out.remaining = remaining;
  return out;
}

}  // namespace cat0
