#include <algorithm>
#include <cmath>

#include "cat0/errors.hpp"
#include "cat0/spm.hpp"

namespace cat0 {

namespace {

int edge_other_end(const PolyComplex2D::Edge& e, int v) { return e.v0 == v ? e.v1 : e.v0; }

// One backward step of the query: the last leg of the geodesic ends at a
// known point of a face and starts at a vertex recovered by walking the
// face-incoming records, unfolding E-type faces until the leg's start vertex
// is found.  Emits the leg's segments and crossings (target side first) and
// returns the vertex.
struct Walker {
  const PolyComplex2D& c;
  const LastStepMap& lsm;
  long guard;
  std::vector<GeodesicPath::Seg> rseg;
  std::vector<GeodesicPath::Crossing> rcross;
  std::vector<int> rbends;

  struct Hop {
    int face = -1, side = -1, edge = -1;
    Vec2 a, b;  // placed side corners (side corner s, then s+1)
    Iso2 p;     // face frame -> plane, for `face`
  };

  Walker(const PolyComplex2D& cx, const LastStepMap& m)
      : c(cx), lsm(m), guard(4L * (cx.faces.size() + cx.edges.size()) + 16) {}

  void tick() {
    if (--guard < 0) fail(Errc::domain_error, "last step map walk did not terminate");
  }

  int unfold_leg(int f0, Vec2 t_local) {
    Iso2 p = Iso2::identity();
    int f = f0;
    const Vec2 t_plane = t_local;
    std::vector<Hop> hops;

    while (true) {
      tick();
      const auto& fi = lsm.faces[f];
      int cross_edge = -1;
      switch (fi.type) {
        case LastStepMap::FaceIncoming::Type::unreached:
          fail(Errc::unknown_location, "face " + c.faces[f].id + " is not reached");
        case LastStepMap::FaceIncoming::Type::V:
          break;
        case LastStepMap::FaceIncoming::Type::E:
          cross_edge = fi.edges[0];
          if (cross_edge < 0) fail(Errc::domain_error, "E-type face without an entry edge");
          break;
        default: {
          // Side tests happen in the face's own frame (the running transform
          // may be a reflection, which would flip plane-space cross products).
          const Vec2 w = p.inverse().apply(t_plane) - fi.apex;
          const double tol = 1e-9 * (1.0 + norm(w));
          if (cross(fi.wedge_a, w) < -tol)
            cross_edge = fi.beyond_a;
          else if (cross(w, fi.wedge_b) < -tol)
            cross_edge = fi.beyond_b;
          // A missing beyond edge means the wedge side runs along the face
          // boundary; the tolerance band resolves to the vertex.
          break;
        }
      }

      if (cross_edge < 0) {
        const int v = fi.vertex;
        emit(p.apply(fi.apex), t_plane, hops, f, p);
        return v;
      }

      const auto& tag = lsm.edges[cross_edge];
      if (tag.kind != LastStepMap::EdgeIncoming::Kind::face)
        fail(Errc::domain_error,
             "entry edge " + c.edges[cross_edge].id + " carries no incoming face");
      const int s = c.side_of(f, cross_edge);
      Hop h;
      h.face = f;
      h.side = s;
      h.edge = cross_edge;
      h.a = p.apply(c.faces[f].frame[s]);
      h.b = p.apply(c.faces[f].frame[(s + 1) % 3]);
      h.p = p;
      hops.push_back(h);
      p = p.after(glue_transform(c, tag.face, f, cross_edge));
      f = tag.face;
    }
  }

  // Emits the leg from `from` to `to` (both in plane coordinates) split
  // across the hop edges, target side first.  `deep_face`/`deep_p` describe
  // the frame the leg starts in.
  void emit(Vec2 from, Vec2 to, const std::vector<Hop>& hops, int deep_face, const Iso2& deep_p) {
    const int n = static_cast<int>(hops.size());
    std::vector<Vec2> x(n);
    for (int i = 0; i < n; ++i) {
      const auto s = segment_line_param(from, to, hops[i].a, hops[i].b);
      const double si = s ? std::clamp(*s, 0.0, 1.0) : 0.5;
      x[i] = from + si * (to - from);
    }
    for (int i = 0; i < n; ++i) {
      const Vec2 seg_a = x[i];
      const Vec2 seg_b = i == 0 ? to : x[i - 1];
      const Iso2 inv = hops[i].p.inverse();
      rseg.push_back({hops[i].face, -1, inv.apply(seg_a), inv.apply(seg_b)});
      const Vec2 ab = hops[i].b - hops[i].a;
      const double u = std::clamp(dot(x[i] - hops[i].a, ab) / norm2(ab), 0.0, 1.0);
      rcross.push_back({hops[i].edge, c.edge_param_from_side(hops[i].face, hops[i].side, u)});
    }
    const Vec2 seg_b = n == 0 ? to : x[n - 1];
    if (dist(from, seg_b) > 1e-15 || n == 0) {
      const Iso2 inv = deep_p.inverse();
      rseg.push_back({deep_face, -1, inv.apply(from), inv.apply(seg_b)});
    }
  }
};

}  // namespace

GeodesicPath query_path(const PolyComplex2D& c, const LastStepMap& lsm, const MeshPoint& t) {
  validate_point(c, t);
  Walker w(c, lsm);

  int cur = -1;
  bool skip_bend = false;
  switch (t.kind) {
    case MeshPoint::Kind::vertex:
      cur = t.index;
      skip_bend = true;
      break;
    case MeshPoint::Kind::edge: {
      const auto& tag = lsm.edges[t.index];
      if (tag.kind == LastStepMap::EdgeIncoming::Kind::unreached)
        fail(Errc::unknown_location, "edge " + c.edges[t.index].id + " is not reached");
      if (tag.kind == LastStepMap::EdgeIncoming::Kind::along) {
        const auto& e = c.edges[t.index];
        const double len = e.length;
        const double at = t.t * len;
        const double fr = tag.from_vertex == e.v0 ? 0.0 : len;
        if (std::abs(at - fr) > 1e-15)
          w.rseg.push_back({-1, t.index, {fr, 0.0}, {at, 0.0}});
        cur = tag.from_vertex;
      } else {
        cur = w.unfold_leg(tag.face, locate_in_face(c, t, tag.face));
      }
      break;
    }
    case MeshPoint::Kind::face:
      cur = w.unfold_leg(t.index, t.xy);
      break;
  }

  while (cur != lsm.source) {
    w.tick();
    if (!skip_bend) w.rbends.push_back(cur);
    skip_bend = false;
    const auto& vi = lsm.vertices[cur];
    switch (vi.kind) {
      case LastStepMap::VertexIncoming::Kind::unreached:
        fail(Errc::unknown_location, "vertex " + c.vertex_ids[cur] + " is not reached");
      case LastStepMap::VertexIncoming::Kind::source:
        fail(Errc::domain_error, "source marker on a non-source vertex");
      case LastStepMap::VertexIncoming::Kind::along: {
        const auto& e = c.edges[vi.edge];
        const int u = edge_other_end(e, cur);
        const double len = e.length;
        w.rseg.push_back({-1, vi.edge, {u == e.v0 ? 0.0 : len, 0.0}, {u == e.v0 ? len : 0.0, 0.0}});
        cur = u;
        break;
      }
      case LastStepMap::VertexIncoming::Kind::face: {
        const int f = vi.face;
        const int k = c.corner_of(f, cur);
        cur = w.unfold_leg(f, c.faces[f].frame[k]);
        break;
      }
    }
  }

  GeodesicPath path;
  std::reverse(w.rseg.begin(), w.rseg.end());
  std::reverse(w.rcross.begin(), w.rcross.end());
  std::reverse(w.rbends.begin(), w.rbends.end());
  path.segs = std::move(w.rseg);
  path.crossings = std::move(w.rcross);
  path.vertices = std::move(w.rbends);
  for (const auto& seg : path.segs) path.length += dist(seg.a, seg.b);
  return path;
}

}  // namespace cat0
