#include <algorithm>
#include <cmath>
#include <limits>

#include "cat0/errors.hpp"
#include "cat0/spm.hpp"

namespace cat0 {

namespace {

Vec2 corner_dir_a(const PolyComplex2D& c, int f, int k) {
  return normalized(c.faces[f].frame[(k + 1) % 3] - c.faces[f].frame[k]);
}

Vec2 centroid(const PolyComplex2D& c, int f) {
  const auto& fr = c.faces[f].frame;
  return (fr[0] + fr[1] + fr[2]) * (1.0 / 3.0);
}

LinkPoint direction_point(const PolyComplex2D& c, const LinkGraph& link, int f, int k, Vec2 dir) {
  const double ang = c.corner_angle(f, k);
  double off = ccw_angle(corner_dir_a(c, f, k), dir);
  if (off > ang) off = (2 * k_pi - off < off - ang) ? 0.0 : ang;
  int arc = -1;
  for (int a = 0; a < static_cast<int>(link.arcs.size()); ++a)
    if (link.arcs[a].face == f) {
      arc = a;
      break;
    }
  if (arc < 0) return LinkPoint::at_node(0);  // cannot happen on valid complexes
  if (off <= k_eps) return LinkPoint::at_node(link.arcs[arc].a);
  if (off >= ang - k_eps) return LinkPoint::at_node(link.arcs[arc].b);
  return LinkPoint::on_arc(arc, off);
}

// A straight-line path through a fixed corridor of faces, found with the
// funnel algorithm on the unfolded portal sequence and then validated: every
// intermediate portal must be crossed inside its span and in order, and every
// bend must subtend a link angle >= pi.  A candidate passing validation is a
// genuine local geodesic, hence by CAT(0) the global one.
struct Corridor {
  const PolyComplex2D& c;
  std::vector<int> faces;    // face indices, in order
  std::vector<Iso2> place;   // face frame -> plane
  std::vector<int> edges;    // edges[i] joins faces[i] and faces[i+1]

  struct Portal {
    Vec2 l, r;
    int lv = -1, rv = -1;  // complex vertices at the endpoints
    int idx = -1;          // real portal index, -1 for the S/T sentinels
  };

  struct Stop {
    Vec2 pos;
    int vertex = -1;
    int pin = 0, pout = 0;  // arriving / departing real portal index
  };

  std::optional<GeodesicPath> solve(Vec2 s_plane, Vec2 t_plane, int s_vertex, int t_vertex) const {
    const int n = static_cast<int>(faces.size());
    const int np = n - 1;  // real portals

    std::vector<Portal> port;
    port.push_back({s_plane, s_plane, -1, -1, -1});
    for (int i = 0; i < np; ++i) {
      const int f = faces[i];
      const int s = c.side_of(f, edges[i]);
      Portal p;
      p.l = place[i].apply(c.faces[f].frame[s]);
      p.r = place[i].apply(c.faces[f].frame[(s + 1) % 3]);
      p.lv = c.faces[f].v[s];
      p.rv = c.faces[f].v[(s + 1) % 3];
      p.idx = i;
      const Vec2 dir = place[i + 1].apply(centroid(c, faces[i + 1])) -
                       place[i].apply(centroid(c, faces[i]));
      if (cross(dir, p.l - 0.5 * (p.l + p.r)) < 0) {
        std::swap(p.l, p.r);
        std::swap(p.lv, p.rv);
      }
      port.push_back(p);
    }
    port.push_back({t_plane, t_plane, -1, -1, -1});

    // Funnel scan.
    struct RawPivot {
      Vec2 pos;
      int portal = -1, vertex = -1;
    };
    std::vector<RawPivot> raw;
    Vec2 apex = s_plane, fl = s_plane, fr = s_plane;
    int apex_i = 0, li = 0, ri = 0;
    auto vequal = [](Vec2 a, Vec2 b) { return dist(a, b) <= 1e-12; };
    auto area2 = [](Vec2 a, Vec2 b, Vec2 cc) { return cross(b - a, cc - a); };
    // area2 > 0 means the third point is left of the first two; the right
    // boundary narrows when the candidate moves left of it (and emits the
    // left point as a pivot if it crosses all the way over), symmetrically
    // for the left.  Collinear cases tighten, which keeps paths that hug
    // edges or pass straight through vertices on track.
    for (int i = 1; i < static_cast<int>(port.size()); ++i) {
      if (static_cast<int>(raw.size()) > 4 * static_cast<int>(port.size()) + 16) return {};
      const Vec2 l = port[i].l, r = port[i].r;
      if (area2(apex, fr, r) >= 0.0) {
        if (vequal(apex, fr) || area2(apex, fl, r) <= 0.0) {
          fr = r;
          ri = i;
        } else {
          raw.push_back({fl, port[li].idx, port[li].lv});
          apex = fl;
          apex_i = li;
          fl = fr = apex;
          li = ri = apex_i;
          i = apex_i;
          continue;
        }
      }
      if (area2(apex, fl, l) <= 0.0) {
        if (vequal(apex, fl) || area2(apex, fr, l) >= 0.0) {
          fl = l;
          li = i;
        } else {
          raw.push_back({fr, port[ri].idx, port[ri].rv});
          apex = fr;
          apex_i = ri;
          fl = fr = apex;
          li = ri = apex_i;
          i = apex_i;
          continue;
        }
      }
    }

    // Stops: S, merged pivots, T.  Consecutive pivots at the same vertex are
    // one passage through it (the path touching several portal ends there).
    std::vector<Stop> stops;
    stops.push_back({s_plane, s_vertex, -1, -1});
    for (const auto& p : raw) {
      if (p.vertex < 0) return {};  // sentinel leaked into the pivot list
      if (!stops.empty() && stops.back().vertex == p.vertex &&
          dist(stops.back().pos, p.pos) <= 1e-9) {
        stops.back().pout = p.portal;
        continue;
      }
      stops.push_back({p.pos, p.vertex, p.portal, p.portal});
    }
    stops.push_back({t_plane, t_vertex, np, np});
    // A pivot coinciding with an endpoint is that endpoint.
    if (stops.size() >= 2 && stops[1].vertex == stops[0].vertex &&
        dist(stops[1].pos, stops[0].pos) <= 1e-9) {
      stops[0].pout = stops[1].pout;
      stops.erase(stops.begin() + 1);
    }
    const size_t last = stops.size() - 1;
    if (stops.size() >= 2 && stops[last - 1].vertex == stops[last].vertex &&
        dist(stops[last - 1].pos, stops[last].pos) <= 1e-9) {
      stops[last].pin = stops[last - 1].pin;
      stops.erase(stops.begin() + last - 1);
    }

    // Validate and assemble.
    GeodesicPath path;
    std::vector<std::vector<std::pair<int, Vec2>>> legx(stops.size() - 1);
    for (size_t j = 0; j + 1 < stops.size(); ++j) {
      const Stop& a = stops[j];
      const Stop& b = stops[j + 1];
      const Vec2 q0 = a.pos, q1 = b.pos;
      const double leg = dist(q0, q1);
      // Distinct stops at one position cannot be validated (no directions);
      // the degenerate two-stop case is the zero path from a point to itself.
      if (leg <= 1e-12 && stops.size() > 2) return {};
      Vec2 cur = q0;
      int cur_face = a.pout + 1;  // face index after the stop's last portal
      double prev_s = -1e-7;
      for (int i = a.pout + 1; i <= b.pin - 1; ++i) {
        const Portal& p = port[i + 1];  // port[] is offset by the S sentinel
        const auto sp = segment_line_param(q0, q1, p.l, p.r);
        if (!sp) return {};
        const double si = *sp;
        if (si < prev_s - 1e-7 || si < -1e-7 || si > 1 + 1e-7) return {};
        prev_s = si;
        const Vec2 x = q0 + std::clamp(si, 0.0, 1.0) * (q1 - q0);
        const double u = std::clamp(dot(x - p.l, p.r - p.l) / norm2(p.r - p.l), 0.0, 1.0);
        if (u < -1e-7 || u > 1 + 1e-7) return {};
        if (dist(cur, x) > 1e-15) {
          const Iso2 inv = place[cur_face].inverse();
          path.segs.push_back({faces[cur_face], -1, inv.apply(cur), inv.apply(x)});
        }
        const int f = faces[i];  // portal i's own frame face
        const int side = c.side_of(f, edges[i]);
        const Vec2 pa = place[i].apply(c.faces[f].frame[side]);
        const Vec2 pb = place[i].apply(c.faces[f].frame[(side + 1) % 3]);
        const double us = std::clamp(dot(x - pa, pb - pa) / norm2(pb - pa), 0.0, 1.0);
        path.crossings.push_back({edges[i], c.edge_param_from_side(f, side, us)});
        legx[j].push_back({i, x});
        cur = x;
        cur_face = i + 1;
      }
      if (dist(cur, q1) > 1e-15) {
        const Iso2 inv = place[cur_face].inverse();
        path.segs.push_back({faces[cur_face], -1, inv.apply(cur), inv.apply(q1)});
      }
      if (j + 2 < stops.size()) path.vertices.push_back(b.vertex);
    }

    // Bend angles: each interior stop must subtend at least pi in its link.
    // A leg may cross several portals exactly at the stop itself (the path
    // runs through a shared portal endpoint), and those crossings carry no
    // direction, so the arriving and departing faces are read off the nearest
    // crossings that actually leave the stop.
    for (size_t j = 1; j + 1 < stops.size(); ++j) {
      const Stop& st = stops[j];
      const Vec2 prev = stops[j - 1].pos, next = stops[j + 1].pos;
      if (dist(prev, st.pos) <= 1e-12 || dist(next, st.pos) <= 1e-12) return {};
      const double deg = 1e-9 * (1.0 + norm(st.pos));
      int iin = stops[j - 1].pout + 1;  // face the arriving leg ends in
      for (const auto& [i, x] : legx[j - 1])
        if (dist(x, st.pos) > deg) iin = i + 1;
      int iout = stops[j + 1].pin;  // face the departing leg starts in
      for (auto it = legx[j].rbegin(); it != legx[j].rend(); ++it)
        if (dist(it->second, st.pos) > deg) iout = it->first;
      const int fin = faces[iin], fout = faces[iout];
      const auto has_corner = [&](int f) {
        return c.faces[f].v[0] == st.vertex || c.faces[f].v[1] == st.vertex ||
               c.faces[f].v[2] == st.vertex;
      };
      if (!has_corner(fin) || !has_corner(fout)) return {};
      const Vec2 din = place[iin].inverse().apply_dir(normalized(prev - st.pos));
      const Vec2 dout = place[iout].inverse().apply_dir(normalized(next - st.pos));
      const LinkGraph link = vertex_link(c, st.vertex);
      const LinkPoint ip = direction_point(c, link, fin, c.corner_of(fin, st.vertex), din);
      const LinkPoint op = direction_point(c, link, fout, c.corner_of(fout, st.vertex), dout);
      const auto d = link_distance(link, ip, op, k_pi + 0.1);
      if (d && *d < k_pi - 1e-7) return {};
    }

    for (const auto& seg : path.segs) path.length += dist(seg.a, seg.b);
    return path;
  }
};

}  // namespace

GeodesicPath brute_force_geodesic(const PolyComplex2D& c, const MeshPoint& s, const MeshPoint& t,
                                  int max_faces) {
  validate_point(c, s);
  validate_point(c, t);

  std::vector<char> is_tface(c.faces.size(), 0);
  for (int f : faces_of(c, t)) is_tface[f] = 1;

  std::optional<GeodesicPath> best;
  double best_len = std::numeric_limits<double>::infinity();
  long ticks = 0;
  const long tick_cap = 5000000;

  Corridor cor{c, {}, {}, {}};
  std::vector<char> used(c.faces.size(), 0);
  Vec2 s_plane;
  int s_vertex = s.kind == MeshPoint::Kind::vertex ? s.index : -1;
  const int t_vertex = t.kind == MeshPoint::Kind::vertex ? t.index : -1;

  auto consider = [&](int f) {
    if (!is_tface[f]) return;
    const Vec2 t_plane = cor.place.back().apply(locate_in_face(c, t, f));
    auto got = cor.solve(s_plane, t_plane, s_vertex, t_vertex);
    if (got && got->length < best_len - 1e-12) {
      best_len = got->length;
      best = std::move(got);
    }
  };

  // Depth-first over simple face corridors.
  auto dfs = [&](auto&& self, int f) -> void {
    if (++ticks > tick_cap) return;
    consider(f);
    if (static_cast<int>(cor.faces.size()) >= max_faces) return;
    for (int side = 0; side < 3; ++side) {
      const int e = c.faces[f].e[side];
      // Prune: the whole subtree is reached through this portal.
      const Vec2 pa = cor.place.back().apply(c.faces[f].frame[side]);
      const Vec2 pb = cor.place.back().apply(c.faces[f].frame[(side + 1) % 3]);
      if (dist_point_segment(s_plane, pa, pb) >= best_len - 1e-12) continue;
      bool skipped_self = false;
      for (int g : c.edges[e].faces) {
        if (g == f && !skipped_self) {
          skipped_self = true;
          continue;
        }
        if (used[g]) continue;
        used[g] = 1;
        cor.faces.push_back(g);
        cor.place.push_back(cor.place.back().after(glue_transform(c, g, f, e)));
        cor.edges.push_back(e);
        self(self, g);
        cor.faces.pop_back();
        cor.place.pop_back();
        cor.edges.pop_back();
        used[g] = 0;
      }
    }
  };

  for (int f0 : faces_of(c, s)) {
    s_plane = locate_in_face(c, s, f0);
    used.assign(c.faces.size(), 0);
    used[f0] = 1;
    cor.faces = {f0};
    cor.place = {Iso2::identity()};
    cor.edges.clear();
    dfs(dfs, f0);
  }

  if (!best)
    fail(Errc::depth_exceeded,
         "no corridor of at most " + std::to_string(max_faces) + " faces reaches the target");
  return *best;
}

}  // namespace cat0
