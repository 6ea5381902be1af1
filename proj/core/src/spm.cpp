#include "cat0/spm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "cat0/errors.hpp"
#include "cat0/log.hpp"

namespace cat0 {

namespace {

// Tolerance for recognizing duplicate geodesic claims; anything closer than
// this is a tie between equal-length paths along a region boundary.
constexpr double k_claim_tol = 1e-7;

int edge_other_end(const PolyComplex2D::Edge& e, int v) { return e.v0 == v ? e.v1 : e.v0; }

// Direction of the arc's `a` end at corner k of face f (the side leaving the
// corner counterclockwise); offsets along the arc rotate counterclockwise
// from here.
Vec2 corner_dir_a(const PolyComplex2D& c, int f, int k) {
  return normalized(c.faces[f].frame[(k + 1) % 3] - c.faces[f].frame[k]);
}

std::string vid(const PolyComplex2D& c, int v) { return c.vertex_ids[v]; }

}  // namespace

Ruffle ruffle(const LinkGraph& link, int v, const std::optional<LinkPoint>& incoming) {
  Ruffle r;
  r.vertex = v;
  if (!incoming) {
    r.whole_link = true;
    for (int n = 0; n < link.node_count(); ++n) r.nodes.push_back(n);
    for (int a = 0; a < static_cast<int>(link.arcs.size()); ++a)
      r.intervals.push_back({a, 0.0, link.arcs[a].w});
    return r;
  }
  r.incoming = *incoming;
  const LinkSearch search = link_search(link, link_seeds(link, *incoming), k_pi + 0.5);
  for (int n = 0; n < link.node_count(); ++n)
    if (search.dist[n] >= k_pi - k_eps) r.nodes.push_back(n);
  for (int a = 0; a < static_cast<int>(link.arcs.size()); ++a) {
    const auto& arc = link.arcs[a];
    // The incoming direction's own arc never reaches pi: arc weights are
    // triangle corner angles, all below pi.
    if (!incoming->is_node() && incoming->arc == a) continue;
    double lo = 0.0, hi = arc.w;
    bool lo_strict = false, hi_strict = false;
    if (search.dist[arc.a] < k_pi) {
      lo = k_pi - search.dist[arc.a];
      lo_strict = true;
    }
    if (search.dist[arc.b] < k_pi) {
      hi = arc.w - (k_pi - search.dist[arc.b]);
      hi_strict = true;
    }
    if (lo > hi + k_eps) continue;
    if (hi < lo) hi = lo;
    r.intervals.push_back({a, lo, hi});
    if (lo_strict && lo > k_eps) r.rays.push_back({a, lo, -1, {}, {}});
    if (hi_strict && hi < arc.w - k_eps && hi > lo + k_eps) r.rays.push_back({a, hi, -1, {}, {}});
  }
  return r;
}

Ruffle ruffle(const PolyComplex2D& c, int v, const std::optional<LinkPoint>& incoming) {
  const LinkGraph link = vertex_link(c, v);
  Ruffle r = ruffle(link, v, incoming);
  for (auto& ray : r.rays) {
    const int f = link.arcs[ray.arc].face;
    const int k = c.corner_of(f, v);
    ray.face = f;
    ray.origin = c.faces[f].frame[k];
    ray.dir = rotated(corner_dir_a(c, f, k), ray.offset);
  }
  return r;
}

namespace {

// ----------------------------------------------------------------------------
// Wedge-against-triangle clipping with labeled output, so exits know whether
// their endpoints sit at triangle corners or on one of the wedge rays.

struct ClipVert {
  Vec2 p;
  int corner = -1;         // original triangle corner, or -1
  int ray = 0;             // 1: cut by ray a, 2: cut by ray b
  unsigned side_mask = 0;  // triangle sides this vertex lies on
};

std::vector<ClipVert> clip_half(const std::vector<ClipVert>& poly, Vec2 apex, Vec2 d, int ray_bit,
                                double tol) {
  std::vector<ClipVert> out;
  const int n = static_cast<int>(poly.size());
  for (int i = 0; i < n; ++i) {
    const ClipVert& p = poly[i];
    const ClipVert& q = poly[(i + 1) % n];
    const double dp = cross(d, p.p - apex);
    const double dq = cross(d, q.p - apex);
    const bool pin = dp >= -tol, qin = dq >= -tol;
    if (pin) out.push_back(p);
    if (pin != qin) {
      const double t = dp / (dp - dq);
      ClipVert m;
      m.p = p.p + t * (q.p - p.p);
      m.ray = ray_bit;
      m.side_mask = p.side_mask & q.side_mask;
      out.push_back(m);
    }
  }
  return out;
}

struct WedgeClip {
  struct Piece {
    int side = -1;
    double u_lo = 0.0, u_hi = 0.0;  // side fractions
    ClipVert at_lo, at_hi;
  };
  std::vector<Piece> pieces;
};

WedgeClip clip_wedge(const PolyComplex2D& c, int f, Vec2 apex, Vec2 da, Vec2 db) {
  const auto& fr = c.faces[f].frame;
  double scale = 1.0;
  for (int k = 0; k < 3; ++k) scale = std::max(scale, dist(fr[k], apex));
  const double tol = 1e-12 * scale;

  std::vector<ClipVert> poly(3);
  for (int k = 0; k < 3; ++k) {
    poly[k].p = fr[k];
    poly[k].corner = k;
    poly[k].side_mask = (1u << k) | (1u << ((k + 2) % 3));
  }
  // clip_half keeps cross(d, x - apex) >= 0, the counterclockwise side of d;
  // for db we need the clockwise side, so clip against -db.
  poly = clip_half(poly, apex, da, 1, tol);
  poly = clip_half(poly, apex, -db, 2, tol);
  WedgeClip out;
  if (poly.empty()) return out;

  // Snap near-corner cut points back to their corner so ray-through-corner
  // configurations keep exact labels.
  const double snap = 1e-9 * scale;
  for (auto& cv : poly) {
    for (int k = 0; k < 3; ++k) {
      if (dist(cv.p, fr[k]) <= snap) {
        cv.p = fr[k];
        cv.corner = k;
        cv.ray = 0;
        cv.side_mask = (1u << k) | (1u << ((k + 2) % 3));
      }
    }
  }

  for (int s = 0; s < 3; ++s) {
    const Vec2 a = fr[s], b = fr[(s + 1) % 3];
    const double len2 = norm2(b - a);
    bool have = false;
    double lo = 0, hi = 0;
    ClipVert at_lo, at_hi;
    const int n = static_cast<int>(poly.size());
    for (int i = 0; i < n; ++i) {
      const ClipVert& p = poly[i];
      const ClipVert& q = poly[(i + 1) % n];
      if (!(p.side_mask & q.side_mask & (1u << s))) continue;
      double up = dot(p.p - a, b - a) / len2;
      double uq = dot(q.p - a, b - a) / len2;
      ClipVert vp = p, vq = q;
      if (up > uq) {
        std::swap(up, uq);
        std::swap(vp, vq);
      }
      if (!have) {
        lo = up;
        hi = uq;
        at_lo = vp;
        at_hi = vq;
        have = true;
      } else {
        if (up < lo) {
          lo = up;
          at_lo = vp;
        }
        if (uq > hi) {
          hi = uq;
          at_hi = vq;
        }
      }
    }
    if (have && hi - lo > 1e-12)
      out.pieces.push_back({s, std::clamp(lo, 0.0, 1.0), std::clamp(hi, 0.0, 1.0), at_lo, at_hi});
  }
  return out;
}

// ----------------------------------------------------------------------------
// Frontier machinery.

struct SideRef {
  enum class Kind { none, vertex, branch } kind = Kind::none;
  int id = -1;
};

struct FrontierItem {
  bool is_vertex = false;
  int vertex = -1;
  int edge = -1;
  double lo = 0.0, hi = 0.0;  // edge parameters
  int region = -1;
  SideRef ref_lo, ref_hi;
};

struct EdgeCover {
  bool along = false;
  int from_vertex = -1;
  int face = -1;  // incoming face for transversal coverage
  struct Piece {
    double lo, hi;
    int region;
  };
  std::vector<Piece> pieces;
};

struct VertexAux {
  LinkGraph link;
  std::unordered_map<int, int> arc_of_face;   // face -> arc (first corner)
  std::unordered_map<int, int> node_of_edge;  // edge -> link node
};

struct Builder {
  const PolyComplex2D& c;
  SpmOptions opt;
  ShortestPathMap out;
  std::deque<FrontierItem> fifo;
  std::vector<EdgeCover> cover;
  std::vector<char> explored;
  std::vector<VertexAux> vaux;
  std::map<std::pair<int, int>, std::vector<int>> roots;     // (vertex, face) -> root branches
  std::map<std::pair<int, int>, std::vector<int>> children;  // (parent, face) -> child branches

  explicit Builder(const PolyComplex2D& cx, const SpmOptions& o) : c(cx), opt(o) {}

  void note(const std::string& msg) {
    out.conflicts.push_back(msg);
    log_line(LogLevel::info, "spm: " + msg);
  }

  void check_cap() {
    if (static_cast<long>(out.regions.size()) >= opt.region_cap)
      fail(Errc::budget_exceeded, "shortest path map exceeded the region cap of " +
                                      std::to_string(opt.region_cap));
  }

  LinkPoint direction_link_point(int f, int k, Vec2 dir) const {
    const int v = c.faces[f].v[k];
    const double ang = c.corner_angle(f, k);
    double off = ccw_angle(corner_dir_a(c, f, k), dir);
    if (off > ang) off = (2 * k_pi - off < off - ang) ? 0.0 : ang;
    const int arc = vaux[v].arc_of_face.at(f);
    const auto& a = vaux[v].link.arcs[arc];
    if (off <= k_eps) return LinkPoint::at_node(a.a);
    if (off >= ang - k_eps) return LinkPoint::at_node(a.b);
    return LinkPoint::on_arc(arc, off);
  }

  int get_or_create_root(int v, int f, Vec2 origin, Vec2 dir) {
    auto& list = roots[{v, f}];
    for (int id : list) {
      const auto& seg = out.branches[id].segs.front();
      if (dist(seg.origin, origin) <= 1e-7 * (1 + norm(origin)) &&
          angle_between(seg.dir, dir) <= 1e-6)
        return id;
    }
    BoundaryBranch b;
    b.tree = static_cast<int>(out.branches.size());
    b.parent = -1;
    b.root_vertex = v;
    b.segs.push_back({f, origin, dir});
    out.branches.push_back(b);
    list.push_back(b.tree);
    return b.tree;
  }

  int extend_or_fork(int branch, int f, int fan_out, Vec2 at, Vec2 dir) {
    if (fan_out <= 1) {
      auto& b = out.branches[branch];
      for (const auto& seg : b.segs)
        if (seg.face == f && dist(seg.origin, at) <= 1e-7 * (1 + norm(at)) &&
            angle_between(seg.dir, dir) <= 1e-6)
          return branch;
      b.segs.push_back({f, at, dir});
      return branch;
    }
    auto& list = children[{branch, f}];
    for (int id : list) {
      const auto& seg = out.branches[id].segs.front();
      if (dist(seg.origin, at) <= 1e-7 * (1 + norm(at)) && angle_between(seg.dir, dir) <= 1e-6)
        return id;
    }
    BoundaryBranch child;
    child.tree = out.branches[branch].tree;
    child.parent = branch;
    child.root_vertex = out.branches[branch].root_vertex;
    child.segs.push_back({f, at, dir});
    const int id = static_cast<int>(out.branches.size());
    out.branches.push_back(child);
    out.branches[branch].children++;
    list.push_back(id);
    return id;
  }

  void claim_vertex(int v, double dist_v, int parent, int along_edge, int via_region,
                    LinkPoint incoming, double hop) {
    auto& st = out.vertices[v];
    if (st.reached) {
      if (dist_v < st.dist - k_claim_tol * (1.0 + dist_v)) {
        std::ostringstream os;
        os << "vertex " << vid(c, v) << " re-claimed shorter (" << dist_v << " < " << st.dist
           << ")";
        note(os.str());
      }
      return;
    }
    st.reached = true;
    st.dist = dist_v;
    st.parent = parent;
    st.along_edge = along_edge;
    st.via_region = via_region;
    st.incoming = incoming;
    st.hop = hop;
    check_cap();
    SPMRegion r0;
    r0.dim = 0;
    r0.vertex = v;
    out.regions.push_back(r0);
    FrontierItem item;
    item.is_vertex = true;
    item.vertex = v;
    fifo.push_back(item);
  }

  SideRef make_ref(const SPMRegion& r, int f, const ClipVert& cv) {
    if (cv.corner >= 0) return {SideRef::Kind::vertex, c.faces[f].v[cv.corner]};
    if (cv.ray == 1 && r.branch_a >= 0) return {SideRef::Kind::branch, r.branch_a};
    if (cv.ray == 2 && r.branch_b >= 0) return {SideRef::Kind::branch, r.branch_b};
    note("exit endpoint in face " + c.faces[f].id + " lost its label");
    return {};
  }

  int add_region2(int f, int apex_vertex, Vec2 apex, Vec2 da, Vec2 db, int branch_a, int branch_b,
                  int entry_edge, double entry_lo, double entry_hi, int entry_face,
                  int entry_region) {
    check_cap();
    SPMRegion r;
    r.dim = 2;
    r.face = f;
    r.apex_vertex = apex_vertex;
    r.apex_dist = out.vertices[apex_vertex].dist;
    r.apex = apex;
    r.dir_a = da;
    r.dir_b = db;
    r.branch_a = branch_a;
    r.branch_b = branch_b;
    r.closed_a = branch_a >= 0 && out.branches[branch_a].root_vertex == apex_vertex;
    r.closed_b = branch_b >= 0 && out.branches[branch_b].root_vertex == apex_vertex;
    r.entry_edge = entry_edge;
    r.entry_lo = entry_lo;
    r.entry_hi = entry_hi;
    r.entry_face = entry_face;
    r.entry_region = entry_region;

    const int id = static_cast<int>(out.regions.size());
    const WedgeClip clip = clip_wedge(c, f, apex, da, db);
    const int apex_corner = entry_edge < 0 ? c.corner_of(f, apex_vertex) : -1;
    const int entry_side = entry_edge >= 0 ? c.side_of(f, entry_edge) : -1;

    std::vector<FrontierItem> pushes;
    for (const auto& piece : clip.pieces) {
      if (entry_side >= 0 && piece.side == entry_side) continue;
      if (apex_corner >= 0 && piece.side != (apex_corner + 1) % 3) continue;
      // A piece lying on a wedge boundary ray is the ray itself (a straight
      // continuation along the edge); it has measure zero in the region and
      // its edge is covered along its length elsewhere.
      const Vec2 q0 = piece.at_lo.p - apex, q1 = piece.at_hi.p - apex;
      const double rtol = 1e-9 * (1.0 + std::max(norm(q0), norm(q1)));
      if ((std::abs(cross(da, q0)) <= rtol && std::abs(cross(da, q1)) <= rtol) ||
          (std::abs(cross(db, q0)) <= rtol && std::abs(cross(db, q1)) <= rtol))
        continue;
      const int e = c.faces[f].e[piece.side];
      double t_lo = c.edge_param_from_side(f, piece.side, piece.u_lo);
      double t_hi = c.edge_param_from_side(f, piece.side, piece.u_hi);
      SideRef ref_lo = make_ref(r, f, piece.at_lo);
      SideRef ref_hi = make_ref(r, f, piece.at_hi);
      if (t_lo > t_hi) {
        std::swap(t_lo, t_hi);
        std::swap(ref_lo, ref_hi);
      }
      r.exits.push_back({e, t_lo, t_hi});

      auto& cov = cover[e];
      if (cov.along) {
        note("edge " + c.edges[e].id + " is covered along its length and transversally");
        continue;
      }
      if (cov.face >= 0 && cov.face != f)
        note("edge " + c.edges[e].id + " entered from two faces: " + c.faces[cov.face].id +
             " and " + c.faces[f].id);
      if (cov.face < 0) cov.face = f;
      for (const auto& pc : cov.pieces)
        if (std::min(t_hi, pc.hi) - std::max(t_lo, pc.lo) > k_claim_tol) {
          note("edge " + c.edges[e].id + " covered twice");
          break;
        }
      cov.pieces.push_back({t_lo, t_hi, id});

      FrontierItem item;
      item.edge = e;
      item.lo = t_lo;
      item.hi = t_hi;
      item.region = id;
      item.ref_lo = ref_lo;
      item.ref_hi = ref_hi;
      pushes.push_back(item);
    }

    // Vertex exits: corners inside the wedge (never the apex and, in the
    // segment case, only the corner opposite the entry edge).  Boundary hits
    // count: a corner landing exactly on a dividing ray is reached by both
    // flanking regions at the same distance, and the first claim wins.
    int exit_vertex = -1;
    for (int k = 0; k < 3; ++k) {
      if (entry_side >= 0 && k != (entry_side + 2) % 3) continue;
      if (k == apex_corner) continue;
      const Vec2 w = c.faces[f].frame[k];
      if (dist(w, apex) <= k_eps) continue;
      const double stol = 1e-9 * std::max(1.0, dist(w, apex));
      if (cross(da, w - apex) > -stol && cross(w - apex, db) > -stol) {
        exit_vertex = c.faces[f].v[k];
        r.exit_vertex = exit_vertex;
        break;
      }
    }

    out.regions.push_back(r);
    out.face_regions[f].push_back(id);

    if (exit_vertex >= 0) {
      const int k = c.corner_of(f, exit_vertex);
      const Vec2 w = c.faces[f].frame[k];
      const double hop = dist(w, apex);
      claim_vertex(exit_vertex, r.apex_dist + hop, apex_vertex, -1, id,
                   direction_link_point(f, k, normalized(apex - w)), hop);
    }
    for (auto& item : pushes) fifo.push_back(item);
    return id;
  }

  void explore_vertex(int v) {
    const auto& aux = vaux[v];
    std::optional<LinkPoint> inc;
    if (v != out.source) inc = out.vertices[v].incoming;
    const Ruffle ruf = ruffle(aux.link, v, inc);
    const double dist_v = out.vertices[v].dist;

    for (int n : ruf.nodes) {
      const int e = c.vertex_edges[v][n];
      auto& cov = cover[e];
      if (cov.along) {
        if (cov.from_vertex != v) {
          const double mine = dist_v + c.edges[e].length;
          const double theirs = out.vertices[cov.from_vertex].dist + c.edges[e].length;
          if (std::abs(mine - theirs) > k_claim_tol * (1 + mine))
            note("edge " + c.edges[e].id + " runs along shortest paths from both endpoints");
        }
        continue;
      }
      if (!cov.pieces.empty()) {
        note("edge " + c.edges[e].id + " claimed along after transversal coverage");
        continue;
      }
      cov.along = true;
      cov.from_vertex = v;
      check_cap();
      SPMRegion r1;
      r1.dim = 1;
      r1.edge = e;
      r1.from_vertex = v;
      r1.apex_vertex = v;
      r1.apex_dist = dist_v;
      out.regions.push_back(r1);
      const int w = edge_other_end(c.edges[e], v);
      claim_vertex(w, dist_v + c.edges[e].length, v, e, -1,
                   LinkPoint::at_node(vaux[w].node_of_edge.at(e)), c.edges[e].length);
    }

    // A wedge side owns a boundary branch only where the ruffle boundary is
    // strict (cut by the pi-ball); an endpoint resting on a link node runs
    // along the corresponding edge instead.
    auto has_ray = [&](int arc, double offset) {
      for (const auto& ray : ruf.rays)
        if (ray.arc == arc && std::abs(ray.offset - offset) <= 1e-12) return true;
      return false;
    };
    for (const auto& iv : ruf.intervals) {
      const auto& arc = aux.link.arcs[iv.arc];
      const int f = arc.face;
      const int k = c.corner_of(f, v);
      const Vec2 apex = c.faces[f].frame[k];
      const Vec2 da = rotated(corner_dir_a(c, f, k), iv.lo);
      const Vec2 db = rotated(corner_dir_a(c, f, k), iv.hi);
      int ba = -1, bb = -1;
      if (has_ray(iv.arc, iv.lo)) ba = get_or_create_root(v, f, apex, da);
      if (has_ray(iv.arc, iv.hi)) bb = get_or_create_root(v, f, apex, db);
      // Zero width: the bare antipodal ray at a flat vertex.  The root was
      // just created; it bounds no region of its own.
      if (iv.hi - iv.lo <= k_eps) continue;
      add_region2(f, v, apex, da, db, ba, bb, -1, 0.0, 0.0, -1, -1);
    }
  }

  void explore_segment(const FrontierItem& item) {
    const SPMRegion parent = out.regions[item.region];
    const int e = item.edge;
    const int g = parent.face;
    bool skipped_g = false;
    for (int f : c.edges[e].faces) {
      if (f == g && !skipped_g) {
        skipped_g = true;
        continue;
      }
      spawn(f, item, parent);
    }
  }

  void spawn(int f, const FrontierItem& item, const SPMRegion& parent) {
    const int e = item.edge;
    const Iso2 to_f = glue_transform(c, parent.face, f, e);
    const Vec2 apex = to_f.apply(parent.apex);
    const int s = c.side_of(f, e);
    const Vec2 p_lo = c.side_point(f, s, c.side_param_from_edge(f, s, item.lo));
    const Vec2 p_hi = c.side_point(f, s, c.side_param_from_edge(f, s, item.hi));
    Vec2 d_lo = p_lo - apex, d_hi = p_hi - apex;
    if (norm(d_lo) < 1e-12 || norm(d_hi) < 1e-12) {
      note("degenerate spawn across edge " + c.edges[e].id);
      return;
    }
    d_lo = normalized(d_lo);
    d_hi = normalized(d_hi);

    Vec2 da = d_lo, db = d_hi, pa = p_lo, pb = p_hi;
    SideRef ref_a = item.ref_lo, ref_b = item.ref_hi;
    if (cross(da, db) < 0) {
      std::swap(da, db);
      std::swap(pa, pb);
      std::swap(ref_a, ref_b);
    }

    const int fan_out = static_cast<int>(c.edges[e].faces.size()) - 1;
    const int ba = resolve_side(ref_a, f, fan_out, pa, da, apex);
    const int bb = resolve_side(ref_b, f, fan_out, pb, db, apex);
    add_region2(f, parent.apex_vertex, apex, da, db, ba, bb, e, item.lo, item.hi, parent.face,
                item.region);
  }

  int resolve_side(const SideRef& ref, int f, int fan_out, Vec2 at, Vec2 dir, Vec2 apex) {
    switch (ref.kind) {
      case SideRef::Kind::vertex: {
        const int k = c.corner_of(f, ref.id);
        if (k < 0) {
          note("side vertex " + vid(c, ref.id) + " is not a corner of " + c.faces[f].id);
          return -1;
        }
        const Vec2 origin = c.faces[f].frame[k];
        return get_or_create_root(ref.id, f, origin, normalized(origin - apex));
      }
      case SideRef::Kind::branch:
        return extend_or_fork(ref.id, f, fan_out, at, dir);
      case SideRef::Kind::none:
        return -1;
    }
    return -1;
  }

  void run(int source) {
    out.source = source;
    const int nv = static_cast<int>(c.vertex_ids.size());
    out.vertices.resize(nv);
    out.face_regions.resize(c.faces.size());
    cover.resize(c.edges.size());
    explored.assign(nv, 0);
    vaux.resize(nv);
    for (int v = 0; v < nv; ++v) {
      auto& aux = vaux[v];
      aux.link = vertex_link(c, v);
      for (int i = 0; i < static_cast<int>(c.vertex_edges[v].size()); ++i)
        aux.node_of_edge[c.vertex_edges[v][i]] = i;
      for (int a = 0; a < static_cast<int>(aux.link.arcs.size()); ++a)
        aux.arc_of_face.emplace(aux.link.arcs[a].face, a);
    }

    auto& st = out.vertices[source];
    st.reached = true;
    st.dist = 0.0;
    SPMRegion r0;
    r0.dim = 0;
    r0.vertex = source;
    out.regions.push_back(r0);
    explored[source] = 1;
    explore_vertex(source);

    while (!fifo.empty()) {
      const FrontierItem item = fifo.front();
      fifo.pop_front();
      if (item.is_vertex) {
        if (explored[item.vertex]) continue;
        explored[item.vertex] = 1;
        explore_vertex(item.vertex);
      } else {
        explore_segment(item);
      }
    }

    out.links.reserve(nv);
    for (int v = 0; v < nv; ++v) out.links.push_back(std::move(vaux[v].link));
  }
};

// Splits the complex so the source becomes a vertex: a face-interior source
// cuts its face into three triangles, an edge-interior source subdivides the
// edge and every incident face.
PolyComplex2D split_at_source(const PolyComplex2D& c, const MeshPoint& p, std::string* source_id) {
  std::vector<std::string> vertices = c.vertex_ids;
  std::vector<EdgeSpec> edges;
  std::vector<FaceSpec> faces;
  auto unique_vertex = [&](std::string base) {
    while (c.vertex_index.count(base)) base += "'";
    return base;
  };
  auto unique_edge = [&](std::string base) {
    while (c.edge_index.count(base)) base += "'";
    return base;
  };
  const std::string s_id = unique_vertex("s");
  *source_id = s_id;
  vertices.push_back(s_id);

  if (p.kind == MeshPoint::Kind::face) {
    const int f = p.index;
    for (const auto& e : c.edges)
      edges.push_back({e.id, c.vertex_ids[e.v0], c.vertex_ids[e.v1], e.length});
    for (int i = 0; i < static_cast<int>(c.faces.size()); ++i) {
      if (i == f) continue;
      faces.push_back({c.faces[i].id,
                       {c.edges[c.faces[i].e[0]].id, c.edges[c.faces[i].e[1]].id,
                        c.edges[c.faces[i].e[2]].id}});
    }
    std::array<std::string, 3> spokes;
    for (int k = 0; k < 3; ++k) {
      spokes[k] = unique_edge(s_id + "-" + c.vertex_ids[c.faces[f].v[k]]);
      edges.push_back({spokes[k], s_id, c.vertex_ids[c.faces[f].v[k]],
                       dist(p.xy, c.faces[f].frame[k])});
    }
    for (int k = 0; k < 3; ++k)
      faces.push_back({c.faces[f].id + "@" + std::to_string(k),
                       {c.edges[c.faces[f].e[k]].id, spokes[(k + 1) % 3], spokes[k]}});
    return build_triangulated(vertices, edges, faces);
  }

  // Edge-interior source.
  const int se = p.index;
  const auto& old = c.edges[se];
  const std::string half0 = unique_edge(old.id + "@0");
  const std::string half1 = unique_edge(old.id + "@1");
  for (int i = 0; i < static_cast<int>(c.edges.size()); ++i) {
    if (i == se) continue;
    const auto& e = c.edges[i];
    edges.push_back({e.id, c.vertex_ids[e.v0], c.vertex_ids[e.v1], e.length});
  }
  edges.push_back({half0, c.vertex_ids[old.v0], s_id, p.t * old.length});
  edges.push_back({half1, s_id, c.vertex_ids[old.v1], (1 - p.t) * old.length});

  std::vector<char> incident(c.faces.size(), 0);
  for (int f : old.faces) incident[f] = 1;
  for (int i = 0; i < static_cast<int>(c.faces.size()); ++i) {
    if (incident[i]) continue;
    faces.push_back({c.faces[i].id,
                     {c.edges[c.faces[i].e[0]].id, c.edges[c.faces[i].e[1]].id,
                      c.edges[c.faces[i].e[2]].id}});
  }
  for (int f : old.faces) {
    const int s = c.side_of(f, se);
    const int w = c.faces[f].v[(s + 2) % 3];
    const Vec2 at = c.side_point(f, s, c.side_param_from_edge(f, s, p.t));
    const std::string spoke = unique_edge(s_id + "-" + c.vertex_ids[w] + "@" + c.faces[f].id);
    edges.push_back({spoke, s_id, c.vertex_ids[w], dist(at, c.faces[f].frame[(s + 2) % 3])});
    // Two halves: (v[s], s, w) and (s, v[s+1], w).
    const bool fwd = c.faces[f].v[s] == old.v0;  // does the side run v0 -> v1?
    faces.push_back({c.faces[f].id + "@0",
                     {fwd ? half0 : half1, spoke, c.edges[c.faces[f].e[(s + 2) % 3]].id}});
    faces.push_back({c.faces[f].id + "@1",
                     {fwd ? half1 : half0, c.edges[c.faces[f].e[(s + 1) % 3]].id, spoke}});
  }
  return build_triangulated(vertices, edges, faces);
}

MeshPoint snap_source(const PolyComplex2D& c, const MeshPoint& p) {
  validate_point(c, p);
  if (p.kind == MeshPoint::Kind::vertex) return p;
  if (p.kind == MeshPoint::Kind::edge) {
    if (p.t <= k_eps) return MeshPoint::at_vertex(c.edges[p.index].v0);
    if (p.t >= 1 - k_eps) return MeshPoint::at_vertex(c.edges[p.index].v1);
    return p;
  }
  const int f = p.index;
  const auto& fr = c.faces[f].frame;
  for (int k = 0; k < 3; ++k)
    if (dist(p.xy, fr[k]) <= k_eps) return MeshPoint::at_vertex(c.faces[f].v[k]);
  for (int s = 0; s < 3; ++s) {
    const Vec2 a = fr[s], b = fr[(s + 1) % 3];
    if (dist_point_segment(p.xy, a, b) <= k_eps) {
      const double u = std::clamp(dot(p.xy - a, b - a) / norm2(b - a), 0.0, 1.0);
      return MeshPoint::at_edge(c.faces[f].e[s], c.edge_param_from_side(f, s, u));
    }
  }
  return p;
}

}  // namespace

ShortestPathMap build_spm(const PolyComplex2D& c, const MeshPoint& source, const SpmOptions& opt) {
  const MeshPoint snapped = snap_source(c, source);
  PolyComplex2D base;
  int source_vertex;
  if (snapped.kind == MeshPoint::Kind::vertex) {
    base = c;
    source_vertex = snapped.index;
  } else {
    std::string sid;
    base = split_at_source(c, snapped, &sid);
    source_vertex = base.vertex(sid);
  }

  Builder b(base, opt);
  b.out.complex = base;
  b.run(source_vertex);
  ShortestPathMap spm = std::move(b.out);
  log_line(LogLevel::info, "spm: " + std::to_string(spm.regions.size()) + " regions, " +
                               std::to_string(spm.branches.size()) + " branches");
  return spm;
}

GeodesicPath ShortestPathMap::sigma(int v) const {
  if (v < 0 || v >= static_cast<int>(vertices.size()))
    fail(Errc::unknown_location, "vertex index out of range");
  if (!vertices[v].reached) fail(Errc::unknown_location, "vertex was not reached from the source");

  const PolyComplex2D& c = complex;
  GeodesicPath path;
  std::vector<GeodesicPath::Seg> rev_segs;
  std::vector<GeodesicPath::Crossing> rev_cross;
  std::vector<int> rev_bends;

  int cur = v;
  while (cur != source) {
    const auto& st = vertices[cur];
    if (st.along_edge >= 0) {
      const auto& e = c.edges[st.along_edge];
      const double len = e.length;
      const bool fwd = st.parent == e.v0;  // leg runs v0 -> v1
      rev_segs.push_back({-1, st.along_edge, {fwd ? 0.0 : len, 0.0}, {fwd ? len : 0.0, 0.0}});
    } else {
      // Walk the claiming region's entry chain backwards, splitting the leg
      // at each entry edge.
      int rid = st.via_region;
      Vec2 end = c.faces[regions[rid].face].frame[c.corner_of(regions[rid].face, cur)];
      std::vector<GeodesicPath::Seg> leg;
      std::vector<GeodesicPath::Crossing> leg_cross;
      while (true) {
        const SPMRegion& r = regions[rid];
        if (r.entry_edge < 0) {
          leg.push_back({r.face, -1, r.apex, end});
          break;
        }
        const int s = c.side_of(r.face, r.entry_edge);
        const Vec2 a = c.faces[r.face].frame[s];
        const Vec2 bb = c.faces[r.face].frame[(s + 1) % 3];
        const auto hit = segment_line_param(r.apex, end, a, bb);
        const double t = hit ? std::clamp(*hit, 0.0, 1.0) : 0.0;
        const Vec2 x = r.apex + t * (end - r.apex);
        leg.push_back({r.face, -1, x, end});
        const double u = dot(x - a, bb - a) / norm2(bb - a);
        leg_cross.push_back({r.entry_edge, c.edge_param_from_side(r.face, s, u)});
        end = glue_transform(c, r.face, r.entry_face, r.entry_edge).apply(x);
        rid = r.entry_region;
      }
      // leg is ordered from the target side back toward the apex; that is
      // already the reversed order we are accumulating.
      for (auto& seg : leg) rev_segs.push_back(seg);
      for (auto& cr : leg_cross) rev_cross.push_back(cr);
    }
    cur = st.parent;
    if (cur != source) rev_bends.push_back(cur);

    if (rev_segs.size() > vertices.size() + regions.size() + 16)
      fail(Errc::depth_exceeded, "sigma reconstruction did not terminate");
  }

  std::reverse(rev_segs.begin(), rev_segs.end());
  std::reverse(rev_cross.begin(), rev_cross.end());
  std::reverse(rev_bends.begin(), rev_bends.end());
  path.segs = std::move(rev_segs);
  path.crossings = std::move(rev_cross);
  path.vertices = std::move(rev_bends);
  for (const auto& seg : path.segs) path.length += dist(seg.a, seg.b);
  return path;
}

std::vector<Vec2> ShortestPathMap::sigma_polyline(int v) const {
  if (!vertices[v].reached) fail(Errc::unknown_location, "vertex was not reached from the source");
  // Collect the bend chain source -> v.
  std::vector<int> chain;
  for (int cur = v; cur != source; cur = vertices[cur].parent) chain.push_back(cur);
  chain.push_back(source);
  std::reverse(chain.begin(), chain.end());

  std::vector<Vec2> pts{{0.0, 0.0}};
  double heading = 0.0;
  for (size_t i = 1; i < chain.size(); ++i) {
    const int w = chain[i];
    if (i > 1) {
      // Turn by (link angle - pi); the side of the turn is not represented.
      const int b = chain[i - 1];
      const auto& st_prev = vertices[b];
      const auto& st_next = vertices[w];
      LinkPoint outgoing = st_prev.incoming;
      if (st_next.along_edge >= 0) {
        for (int n = 0; n < static_cast<int>(complex.vertex_edges[b].size()); ++n)
          if (complex.vertex_edges[b][n] == st_next.along_edge) outgoing = LinkPoint::at_node(n);
      } else {
        // Unfold the next leg's endpoint back into the frame where its apex
        // (= b) lives; the leg leaves b straight toward it.
        int rid = st_next.via_region;
        const SPMRegion* r = &regions[rid];
        Vec2 end = complex.faces[r->face].frame[complex.corner_of(r->face, w)];
        while (r->entry_edge >= 0) {
          end = glue_transform(complex, r->face, r->entry_face, r->entry_edge).apply(end);
          r = &regions[r->entry_region];
        }
        const int k = complex.corner_of(r->face, b);
        double off = ccw_angle(corner_dir_a(complex, r->face, k), normalized(end - r->apex));
        for (int a = 0; a < static_cast<int>(links[b].arcs.size()); ++a)
          if (links[b].arcs[a].face == r->face) {
            const double wt = links[b].arcs[a].w;
            if (off > wt) off = (2 * k_pi - off < off - wt) ? 0.0 : wt;
            outgoing = LinkPoint::on_arc(a, off);
          }
      }
      const auto d = link_distance(links[b], st_prev.incoming, outgoing, 2 * k_pi);
      const double ang = d ? *d : 2 * k_pi;
      heading += ang - k_pi;
    }
    pts.push_back(pts.back() + vertices[w].hop * unit_dir(heading));
  }
  return pts;
}

LastStepMap derive_last_step(const ShortestPathMap& spm) {
  const PolyComplex2D& c = spm.complex;
  LastStepMap lsm;
  lsm.source = spm.source;
  lsm.edges.resize(c.edges.size());
  lsm.vertices.resize(c.vertex_ids.size());
  lsm.faces.resize(c.faces.size());

  for (const auto& r : spm.regions) {
    if (r.dim == 1) {
      auto& e = lsm.edges[r.edge];
      e.kind = LastStepMap::EdgeIncoming::Kind::along;
      e.from_vertex = r.from_vertex;
    } else if (r.dim == 2) {
      for (const auto& ex : r.exits) {
        auto& e = lsm.edges[ex.edge];
        if (e.kind == LastStepMap::EdgeIncoming::Kind::along) continue;
        e.kind = LastStepMap::EdgeIncoming::Kind::face;
        e.face = r.face;
      }
    }
  }

  for (int v = 0; v < static_cast<int>(spm.vertices.size()); ++v) {
    const auto& st = spm.vertices[v];
    auto& out = lsm.vertices[v];
    if (!st.reached) continue;
    out.dist = st.dist;
    if (v == spm.source) {
      out.kind = LastStepMap::VertexIncoming::Kind::source;
    } else if (st.along_edge >= 0) {
      out.kind = LastStepMap::VertexIncoming::Kind::along;
      out.edge = st.along_edge;
    } else {
      const SPMRegion& r = spm.regions[st.via_region];
      out.kind = LastStepMap::VertexIncoming::Kind::face;
      out.face = r.face;
      out.entry_edge = r.entry_edge;
      out.seg_from = r.apex;
    }
  }

  for (int f = 0; f < static_cast<int>(c.faces.size()); ++f) {
    auto& fi = lsm.faces[f];
    const SPMRegion* vreg = nullptr;
    std::vector<int> entry_edges;
    std::vector<int> entry_regions;
    for (int id : spm.face_regions[f]) {
      const SPMRegion& r = spm.regions[id];
      if (r.entry_edge < 0) {
        if (!vreg) vreg = &r;
      } else if (std::find(entry_edges.begin(), entry_edges.end(), r.entry_edge) ==
                 entry_edges.end()) {
        entry_edges.push_back(r.entry_edge);
        entry_regions.push_back(id);
      }
    }
    if (!vreg && entry_edges.empty()) continue;  // unreached

    for (size_t i = 0; i < entry_edges.size() && i < 2; ++i) fi.edges[i] = entry_edges[i];

    if (!vreg && entry_edges.size() == 1) {
      fi.type = LastStepMap::FaceIncoming::Type::E;
      continue;
    }

    if (!vreg && entry_edges.size() >= 2) {
      // A bare boundary ray (zero-width ruffle cone) divides the face: find
      // its root between the two entry edges and reconstruct the vertex cone.
      int v = -1;
      for (int k = 0; k < 3 && v < 0; ++k) {
        const int cand = c.faces[f].v[k];
        int hits = 0;
        for (int e : entry_edges)
          if (c.edges[e].v0 == cand || c.edges[e].v1 == cand) ++hits;
        if (hits >= 2) v = cand;
      }
      const BoundaryBranch* root = nullptr;
      for (const auto& br : spm.branches)
        if (br.parent < 0 && br.root_vertex == v && !br.segs.empty() && br.segs[0].face == f)
          root = &br;
      if (v < 0 || !root) {
        fi.type = LastStepMap::FaceIncoming::Type::E;
        continue;
      }
      fi.type = LastStepMap::FaceIncoming::Type::EVE;
      fi.vertex = v;
      fi.apex = root->segs[0].origin;
      fi.wedge_a = fi.wedge_b = root->segs[0].dir;
      for (size_t i = 0; i < entry_edges.size(); ++i) {
        const SPMRegion& r = spm.regions[entry_regions[i]];
        const Vec2 mid = 0.5 * (r.apex + fi.apex);  // a point on the edge side of the ray
        if (cross(root->segs[0].dir, mid - fi.apex) < 0)
          fi.beyond_a = entry_edges[i];
        else
          fi.beyond_b = entry_edges[i];
      }
      continue;
    }

    fi.vertex = vreg->apex_vertex;
    fi.apex = vreg->apex;
    fi.wedge_a = vreg->dir_a;
    fi.wedge_b = vreg->dir_b;
    if (vreg->branch_a >= 0)
      for (int id : spm.face_regions[f]) {
        const SPMRegion& r = spm.regions[id];
        if (r.entry_edge >= 0 && r.branch_b == vreg->branch_a) fi.beyond_a = r.entry_edge;
      }
    if (vreg->branch_b >= 0)
      for (int id : spm.face_regions[f]) {
        const SPMRegion& r = spm.regions[id];
        if (r.entry_edge >= 0 && r.branch_a == vreg->branch_b) fi.beyond_b = r.entry_edge;
      }
    if (entry_edges.empty())
      fi.type = LastStepMap::FaceIncoming::Type::V;
    else if (entry_edges.size() == 1)
      fi.type = LastStepMap::FaceIncoming::Type::EV;
    else
      fi.type = LastStepMap::FaceIncoming::Type::EVE;
  }
  return lsm;
}

long LastStepMap::item_count() const {
  long n = 0;
  for (const auto& f : faces) {
    if (f.type == FaceIncoming::Type::unreached) continue;
    n += 1;  // the type itself
    if (f.vertex >= 0) n += 1;
    for (int e : f.edges)
      if (e >= 0) n += 1;
    if (f.beyond_a >= 0 || f.wedge_a.x != 0 || f.wedge_a.y != 0) n += 1;  // ray a
    if (f.beyond_b >= 0 || f.wedge_b.x != 0 || f.wedge_b.y != 0) n += 1;  // ray b
  }
  for (const auto& e : edges)
    if (e.kind != EdgeIncoming::Kind::unreached) n += e.kind == EdgeIncoming::Kind::along ? 2 : 3;
  for (const auto& v : vertices)
    if (v.kind != VertexIncoming::Kind::unreached) n += 1;
  return n;
}

EntryReport verify_entry_lemmas(const ShortestPathMap& spm) {
  const PolyComplex2D& c = spm.complex;
  EntryReport rep;
  auto issue = [&](const std::string& msg) {
    rep.ok = false;
    rep.issues.push_back(msg);
  };

  std::vector<int> along_count(c.edges.size(), 0);
  std::vector<std::vector<int>> entry_faces(c.edges.size());
  for (const auto& r : spm.regions) {
    if (r.dim == 1) ++along_count[r.edge];
    if (r.dim != 2) continue;
    for (const auto& ex : r.exits) {
      auto& ef = entry_faces[ex.edge];
      if (std::find(ef.begin(), ef.end(), r.face) == ef.end()) ef.push_back(r.face);
    }
  }
  for (int e = 0; e < static_cast<int>(c.edges.size()); ++e) {
    if (along_count[e] > 1) issue("edge " + c.edges[e].id + " has two along-edge regions");
    if (along_count[e] > 0 && !entry_faces[e].empty())
      issue("edge " + c.edges[e].id + " reached both along its length and from face " +
            c.faces[entry_faces[e][0]].id);
    if (entry_faces[e].size() > 1)
      issue("edge " + c.edges[e].id + " reached from " + std::to_string(entry_faces[e].size()) +
            " faces");
  }

  for (int f = 0; f < static_cast<int>(c.faces.size()); ++f) {
    std::vector<int> vset, eset;
    for (int id : spm.face_regions[f]) {
      const SPMRegion& r = spm.regions[id];
      if (r.entry_edge < 0) {
        if (std::find(vset.begin(), vset.end(), r.apex_vertex) == vset.end())
          vset.push_back(r.apex_vertex);
      } else if (std::find(eset.begin(), eset.end(), r.entry_edge) == eset.end()) {
        eset.push_back(r.entry_edge);
      }
    }
    if (vset.size() > 1) issue("face " + c.faces[f].id + " entered through two vertices");
    if (eset.size() > 2)
      issue("face " + c.faces[f].id + " entered through " + std::to_string(eset.size()) +
            " edges");
    if (!vset.empty())
      for (int e : eset)
        if (c.edges[e].v0 != vset[0] && c.edges[e].v1 != vset[0])
          issue("face " + c.faces[f].id + " has entry edge " + c.edges[e].id +
                " not incident to its entry vertex " + vid(c, vset[0]));
    if (vset.empty() && eset.size() == 2) {
      const auto& e0 = c.edges[eset[0]];
      const auto& e1 = c.edges[eset[1]];
      const bool share = e0.v0 == e1.v0 || e0.v0 == e1.v1 || e0.v1 == e1.v0 || e0.v1 == e1.v1;
      if (!share)
        issue("face " + c.faces[f].id + " entered through two edges with no common vertex");
    }
  }

  for (const auto& msg : spm.conflicts) issue("construction: " + msg);
  return rep;
}

BranchCounts branch_counts(const ShortestPathMap& spm) {
  BranchCounts out;
  std::map<int, std::vector<int>> by_tree;
  for (int i = 0; i < static_cast<int>(spm.branches.size()); ++i)
    by_tree[spm.branches[i].tree].push_back(i);
  for (const auto& [root, ids] : by_tree) {
    BranchCounts::Tree t;
    t.root_branch = root;
    t.root_vertex = spm.branches[root].root_vertex;
    t.branches = static_cast<int>(ids.size());
    std::map<int, int> per_face;
    for (int id : ids) {
      if (spm.branches[id].children == 0) ++t.leaves;
      for (const auto& seg : spm.branches[id].segs) ++per_face[seg.face];
    }
    for (const auto& [face, n] : per_face) t.max_face_entries = std::max(t.max_face_entries, n);
    out.max_leaves = std::max(out.max_leaves, t.leaves);
    out.max_face_entries = std::max(out.max_face_entries, t.max_face_entries);
    out.trees.push_back(t);
  }
  return out;
}

}  // namespace cat0
