#include "cat0/complex.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>

#include "cat0/errors.hpp"
#include "cat0/log.hpp"

namespace cat0 {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

int lookup(const std::unordered_map<std::string, int>& m, const std::string& id,
           const char* what) {
  auto it = m.find(id);
  if (it == m.end()) fail(Errc::malformed_input, std::string("unknown ") + what + " '" + id + "'");
  return it->second;
}

void finish_indices(PolyComplex2D& c) {
  c.vertex_edges.assign(c.vertex_ids.size(), {});
  c.vertex_faces.assign(c.vertex_ids.size(), {});
  for (int i = 0; i < static_cast<int>(c.edges.size()); ++i) {
    c.vertex_edges[c.edges[i].v0].push_back(i);
    c.vertex_edges[c.edges[i].v1].push_back(i);
  }
  for (int i = 0; i < static_cast<int>(c.faces.size()); ++i) {
    for (int k = 0; k < 3; ++k) {
      c.vertex_faces[c.faces[i].v[k]].push_back(i);
      // Faces never repeat an edge (validated at build), so each incident
      // face shows up exactly once here.
      c.edges[c.faces[i].e[k]].faces.push_back(i);
    }
  }
}

// Rank of the face boundary matrix over GF(2), edges as bit positions.
int boundary_rank2(const PolyComplex2D& c) {
  const int words = (static_cast<int>(c.edges.size()) + 63) / 64;
  std::vector<std::vector<uint64_t>> pivots;
  std::vector<int> pivot_bit;
  int rank = 0;
  for (const auto& f : c.faces) {
    std::vector<uint64_t> col(words, 0);
    for (int k = 0; k < 3; ++k) col[f.e[k] / 64] ^= uint64_t(1) << (f.e[k] % 64);
    for (size_t p = 0; p < pivots.size(); ++p) {
      const int b = pivot_bit[p];
      if (col[b / 64] >> (b % 64) & 1) {
        for (int w = 0; w < words; ++w) col[w] ^= pivots[p][w];
      }
    }
    int lead = -1;
    for (int w = 0; w < words && lead < 0; ++w) {
      if (col[w] != 0) lead = w * 64 + std::countr_zero(col[w]);
    }
    if (lead >= 0) {
      pivots.push_back(std::move(col));
      pivot_bit.push_back(lead);
      ++rank;
    }
  }
  return rank;
}

}  // namespace

int PolyComplex2D::vertex(const std::string& id) const { return lookup(vertex_index, id, "vertex"); }
int PolyComplex2D::edge(const std::string& id) const { return lookup(edge_index, id, "edge"); }
int PolyComplex2D::face(const std::string& id) const { return lookup(face_index, id, "face"); }

int PolyComplex2D::corner_of(int f, int v) const {
  for (int k = 0; k < 3; ++k) {
    if (faces[f].v[k] == v) return k;
  }
  return -1;
}

int PolyComplex2D::side_of(int f, int e) const {
  for (int k = 0; k < 3; ++k) {
    if (faces[f].e[k] == e) return k;
  }
  return -1;
}

double PolyComplex2D::corner_angle(int f, int corner) const {
  const auto& fr = faces[f].frame;
  return angle_between(fr[(corner + 1) % 3] - fr[corner], fr[(corner + 2) % 3] - fr[corner]);
}

double PolyComplex2D::side_length(int f, int s) const { return edges[faces[f].e[s]].length; }

Vec2 PolyComplex2D::side_point(int f, int s, double u) const {
  const auto& fr = faces[f].frame;
  return fr[s] + u * (fr[(s + 1) % 3] - fr[s]);
}

double PolyComplex2D::edge_param_from_side(int f, int s, double u) const {
  const bool aligned = faces[f].v[s] == edges[faces[f].e[s]].v0;
  return aligned ? u : 1.0 - u;
}

double PolyComplex2D::side_param_from_edge(int f, int s, double t) const {
  const bool aligned = faces[f].v[s] == edges[faces[f].e[s]].v0;
  return aligned ? t : 1.0 - t;
}

PolyComplex2D build_triangulated(const std::vector<std::string>& vertices,
                                 const std::vector<EdgeSpec>& edges,
                                 const std::vector<FaceSpec>& faces) {
  PolyComplex2D c;
  for (const auto& id : vertices) {
    if (!c.vertex_index.emplace(id, c.vertex_ids.size()).second)
      fail(Errc::malformed_input, "duplicate vertex id '" + id + "'");
    c.vertex_ids.push_back(id);
  }
  for (const auto& e : edges) {
    if (!(e.length > 0)) fail(Errc::malformed_input, "edge '" + e.id + "' must have positive length");
    PolyComplex2D::Edge edge;
    edge.id = e.id;
    edge.v0 = lookup(c.vertex_index, e.v0, "vertex");
    edge.v1 = lookup(c.vertex_index, e.v1, "vertex");
    if (edge.v0 == edge.v1)
      fail(Errc::malformed_input, "edge '" + e.id + "' must join two distinct vertices");
    edge.length = e.length;
    if (!c.edge_index.emplace(e.id, c.edges.size()).second)
      fail(Errc::malformed_input, "duplicate edge id '" + e.id + "'");
    c.edges.push_back(std::move(edge));
  }
  for (const auto& f : faces) {
    PolyComplex2D::Face face;
    face.id = f.id;
    for (int k = 0; k < 3; ++k) face.e[k] = lookup(c.edge_index, f.edges[k], "edge");
    if (face.e[0] == face.e[1] || face.e[1] == face.e[2] || face.e[0] == face.e[2])
      fail(Errc::malformed_input, "face '" + f.id + "' repeats an edge");

    // Corner vertices follow from the edge cycle: e[k] joins v[k] and v[k+1].
    // Parallel edges make the common endpoint ambiguous, so try both
    // orientations of e[0] and keep a consistent assignment.
    const auto& e0 = c.edges[face.e[0]];
    const auto& e1 = c.edges[face.e[1]];
    const auto& e2 = c.edges[face.e[2]];
    bool resolved = false;
    for (int flip = 0; flip < 2 && !resolved; ++flip) {
      const int v0 = flip == 0 ? e0.v0 : e0.v1;
      const int v1 = flip == 0 ? e0.v1 : e0.v0;
      int v2 = -1;
      if (e1.v0 == v1) v2 = e1.v1;
      else if (e1.v1 == v1) v2 = e1.v0;
      else continue;
      const bool closes = (e2.v0 == v2 && e2.v1 == v0) || (e2.v1 == v2 && e2.v0 == v0);
      if (!closes || v0 == v1 || v1 == v2 || v0 == v2) continue;
      face.v = {v0, v1, v2};
      resolved = true;
    }
    if (!resolved)
      fail(Errc::malformed_input, "edges of face '" + f.id + "' do not form a triangle");
    face.frame = triangle_frame(e0.length, e1.length, e2.length);
    if (!c.face_index.emplace(f.id, c.faces.size()).second)
      fail(Errc::malformed_input, "duplicate face id '" + f.id + "'");
    c.faces.push_back(std::move(face));
  }
  finish_indices(c);
  return c;
}

PolyComplex2D build_rectangular(const std::vector<RectSpec>& rects) {
  // Corner slot r*4+k; identify slots through shared edges, then synthesize
  // vertex ids in slot order.
  const int n = static_cast<int>(rects.size());
  UnionFind uf(4 * n);
  std::unordered_map<std::string, std::vector<std::pair<int, int>>> occ;  // edge -> (rect, side)
  std::unordered_map<std::string, double> elen;
  for (int r = 0; r < n; ++r) {
    if (!(rects[r].width > 0) || !(rects[r].height > 0))
      fail(Errc::malformed_input, "rectangle '" + rects[r].id + "' must have positive sides");
    for (int k = 0; k < 4; ++k) {
      const std::string& id = rects[r].edges[k];
      const double len = (k % 2 == 0) ? rects[r].width : rects[r].height;
      auto [it, fresh] = elen.emplace(id, len);
      if (!fresh && std::fabs(it->second - len) > k_eps)
        fail(Errc::malformed_input, "edge '" + id + "' has inconsistent lengths");
      occ[id].push_back({r, k});
    }
  }
  for (auto& [id, slots] : occ) {
    for (size_t j = 1; j < slots.size(); ++j) {
      auto [r0, k0] = slots[0];
      auto [rj, kj] = slots[j];
      // Opposite traversal directions: start of one run meets end of the other.
      uf.unite(r0 * 4 + k0, rj * 4 + (kj + 1) % 4);
      uf.unite(r0 * 4 + (k0 + 1) % 4, rj * 4 + kj);
    }
  }

  PolyComplex2D c;
  std::vector<int> slot_vertex(4 * n, -1);
  for (int s = 0; s < 4 * n; ++s) {
    const int root = uf.find(s);
    if (slot_vertex[root] < 0) {
      slot_vertex[root] = static_cast<int>(c.vertex_ids.size());
      c.vertex_ids.push_back("v" + std::to_string(c.vertex_ids.size()));
    }
    slot_vertex[s] = slot_vertex[root];
  }
  for (size_t i = 0; i < c.vertex_ids.size(); ++i) c.vertex_index[c.vertex_ids[i]] = static_cast<int>(i);

  auto add_edge = [&](const std::string& id, int v0, int v1, double len) {
    auto it = c.edge_index.find(id);
    if (it != c.edge_index.end()) {
      const auto& e = c.edges[it->second];
      if (!((e.v0 == v0 && e.v1 == v1) || (e.v0 == v1 && e.v1 == v0)))
        fail(Errc::malformed_input, "edge '" + id + "' glues inconsistently");
      return it->second;
    }
    if (v0 == v1)
      fail(Errc::malformed_input, "edge '" + id + "' would join a corner to itself");
    PolyComplex2D::Edge e;
    e.id = id;
    e.v0 = v0;
    e.v1 = v1;
    e.length = len;
    c.edge_index[id] = static_cast<int>(c.edges.size());
    c.edges.push_back(std::move(e));
    return static_cast<int>(c.edges.size()) - 1;
  };

  for (int r = 0; r < n; ++r) {
    const RectSpec& rs = rects[r];
    const double w = rs.width, h = rs.height;
    const double d = std::hypot(w, h);
    const int cv[4] = {slot_vertex[r * 4 + 0], slot_vertex[r * 4 + 1], slot_vertex[r * 4 + 2],
                       slot_vertex[r * 4 + 3]};
    int eix[4];
    for (int k = 0; k < 4; ++k)
      eix[k] = add_edge(rs.edges[k], cv[k], cv[(k + 1) % 4], (k % 2 == 0) ? w : h);
    const int diag = add_edge(rs.id + "#d", cv[0], cv[2], d);

    PolyComplex2D::Face t0;
    t0.id = rs.id + "#0";
    t0.v = {cv[0], cv[1], cv[2]};
    t0.e = {eix[0], eix[1], diag};
    t0.frame = {Vec2{0, 0}, Vec2{w, 0}, Vec2{w, h}};
    t0.rect = r;
    PolyComplex2D::Face t1;
    t1.id = rs.id + "#1";
    t1.v = {cv[0], cv[2], cv[3]};
    t1.e = {diag, eix[2], eix[3]};
    t1.frame = {Vec2{0, 0}, Vec2{w, h}, Vec2{0, h}};
    t1.rect = r;
    for (auto& t : {t0, t1}) {
      if (t.v[0] == t.v[1] || t.v[1] == t.v[2] || t.v[0] == t.v[2])
        fail(Errc::malformed_input, "rectangle '" + rs.id + "' collapses under the gluing");
      if (!c.face_index.emplace(t.id, c.faces.size()).second)
        fail(Errc::malformed_input, "duplicate face id '" + t.id + "'");
      c.faces.push_back(t);
    }
  }
  finish_indices(c);
  return c;
}

LinkGraph vertex_link(const PolyComplex2D& c, int v) {
  LinkGraph g;
  std::unordered_map<int, int> node_of_edge;
  for (int e : c.vertex_edges[v]) node_of_edge[e] = g.add_node(c.edges[e].id);
  for (int f : c.vertex_faces[v]) {
    const int k = c.corner_of(f, v);
    const int e_out = c.faces[f].e[k];                // side leaving corner k
    const int e_in = c.faces[f].e[(k + 2) % 3];       // side arriving at corner k
    g.add_arc(node_of_edge.at(e_out), node_of_edge.at(e_in), c.corner_angle(f, k), f);
  }
  g.finish();
  return g;
}

Cat0Report validate_cat0(const PolyComplex2D& c) {
  Cat0Report r;
  const int nv = static_cast<int>(c.vertex_ids.size());
  UnionFind uf(std::max(nv, 1));
  for (const auto& e : c.edges) uf.unite(e.v0, e.v1);
  int components = 0;
  for (int v = 0; v < nv; ++v) {
    if (uf.find(v) == v) ++components;
  }
  if (nv == 0) components = 1;
  r.connected = components <= 1;

  const int b1 = static_cast<int>(c.edges.size()) - nv + components - boundary_rank2(c);
  r.simply_connected = r.connected && b1 == 0;

  for (int v = 0; v < nv; ++v) {
    const LinkGraph g = vertex_link(c, v);
    std::vector<int> witness;
    const auto girth = shortest_link_cycle(g, &witness);
    if (girth && *girth < 2 * k_pi - k_eps) {
      Cat0Report::LinkViolation viol;
      viol.vertex = v;
      viol.girth = *girth;
      for (int a : witness) viol.cycle_faces.push_back(c.faces[g.arcs[a].face].id);
      r.violations.push_back(std::move(viol));
    }
  }

  r.ok = r.connected && r.simply_connected && r.violations.empty();
  std::ostringstream msg;
  if (!r.connected) {
    msg << "complex is disconnected; ";
  } else if (!r.simply_connected) {
    msg << "first homology is nontrivial (b1=" << b1 << "); ";
  }
  if (!r.violations.empty()) {
    msg << r.violations.size() << " vertex link(s) with girth below 2pi; ";
  }
  r.message = r.ok ? "complex is CAT(0)" : msg.str();
  return r;
}

Iso2 glue_transform(const PolyComplex2D& c, int f, int g, int e) {
  int sf = -1, sg = -1;
  if (f == g) {
    for (int k = 0; k < 3; ++k) {
      if (c.faces[f].e[k] != e) continue;
      if (sf < 0) {
        sf = k;
      } else {
        sg = k;
      }
    }
    if (sg < 0) fail(Errc::not_adjacent, "edge does not bound the face twice");
  } else {
    sf = c.side_of(f, e);
    sg = c.side_of(g, e);
    if (sf < 0 || sg < 0) fail(Errc::not_adjacent, "edge does not bound both faces");
  }
  const auto [fa, fb] = c.side_corners(f, sf);
  const auto [ga, gb] = c.side_corners(g, sg);
  const Vec2 p0 = c.faces[f].frame[sf], p1 = c.faces[f].frame[(sf + 1) % 3];
  Vec2 q0 = c.faces[g].frame[sg], q1 = c.faces[g].frame[(sg + 1) % 3];
  if (fa != ga) std::swap(q0, q1);
  if (!((fa == ga && fb == gb) || (fa == gb && fb == ga)))
    fail(Errc::not_adjacent, "edge endpoints disagree between faces");

  const Vec2 f3 = c.faces[f].frame[(sf + 2) % 3];
  const Vec2 g3 = c.faces[g].frame[(sg + 2) % 3];
  const bool f3_left = cross(p1 - p0, f3 - p0) > 0;
  const bool g3_left = cross(q1 - q0, g3 - q0) > 0;
  // The image of f's interior must land opposite g's interior.
  return map_segment(p0, p1, q0, q1, f3_left != g3_left);
}

Vec2 locate_in_face(const PolyComplex2D& c, const MeshPoint& p, int f) {
  switch (p.kind) {
    case MeshPoint::Kind::vertex: {
      const int k = c.corner_of(f, p.index);
      if (k < 0) fail(Errc::not_adjacent, "vertex does not belong to the face");
      return c.faces[f].frame[k];
    }
    case MeshPoint::Kind::edge: {
      const int s = c.side_of(f, p.index);
      if (s < 0) fail(Errc::not_adjacent, "edge does not bound the face");
      return c.side_point(f, s, c.side_param_from_edge(f, s, p.t));
    }
    case MeshPoint::Kind::face:
      if (p.index != f) fail(Errc::not_adjacent, "point lies in a different face");
      return p.xy;
  }
  fail(Errc::domain_error, "invalid point kind");
}

std::vector<int> faces_of(const PolyComplex2D& c, const MeshPoint& p) {
  switch (p.kind) {
    case MeshPoint::Kind::vertex: return c.vertex_faces[p.index];
    case MeshPoint::Kind::edge: return c.edges[p.index].faces;
    case MeshPoint::Kind::face: return {p.index};
  }
  return {};
}

void validate_point(const PolyComplex2D& c, const MeshPoint& p, double tol) {
  switch (p.kind) {
    case MeshPoint::Kind::vertex:
      if (p.index < 0 || p.index >= static_cast<int>(c.vertex_ids.size()))
        fail(Errc::point_not_in_complex, "vertex index out of range");
      return;
    case MeshPoint::Kind::edge:
      if (p.index < 0 || p.index >= static_cast<int>(c.edges.size()))
        fail(Errc::point_not_in_complex, "edge index out of range");
      if (p.t < -tol || p.t > 1 + tol) fail(Errc::point_not_in_complex, "edge parameter outside [0,1]");
      return;
    case MeshPoint::Kind::face: {
      if (p.index < 0 || p.index >= static_cast<int>(c.faces.size()))
        fail(Errc::point_not_in_complex, "face index out of range");
      const auto& fr = c.faces[p.index].frame;
      if (!point_in_convex_polygon({fr[0], fr[1], fr[2]}, p.xy, tol))
        fail(Errc::point_not_in_complex, "coordinates lie outside the face");
      return;
    }
  }
  fail(Errc::domain_error, "invalid point kind");
}

MeshPoint GeodesicPath::point_at(const PolyComplex2D& c, double s, double tol) const {
  if (segs.empty()) fail(Errc::domain_error, "empty path");
  s = std::clamp(s, 0.0, length);
  double acc = 0;
  for (const auto& seg : segs) {
    const double len = dist(seg.a, seg.b);
    if (s <= acc + len + tol) {
      const double u = len > 0 ? std::clamp((s - acc) / len, 0.0, 1.0) : 0.0;
      const Vec2 at = seg.a + u * (seg.b - seg.a);
      if (seg.edge >= 0) {
        double t;
        if (seg.face >= 0) {
          const int side = c.side_of(seg.face, seg.edge);
          const Vec2 a = c.faces[seg.face].frame[side];
          const Vec2 b = c.faces[seg.face].frame[(side + 1) % 3];
          const double u_side = dot(at - a, b - a) / norm2(b - a);
          t = c.edge_param_from_side(seg.face, side, u_side);
        } else {
          t = at.x / c.edges[seg.edge].length;
        }
        return MeshPoint::at_edge(seg.edge, std::clamp(t, 0.0, 1.0));
      }
      return MeshPoint::at_face(seg.face, at);
    }
    acc += len;
  }
  const auto& last = segs.back();
  return last.edge >= 0 ? MeshPoint::at_edge(last.edge, 1.0) : MeshPoint::at_face(last.face, last.b);
}

}  // namespace cat0
