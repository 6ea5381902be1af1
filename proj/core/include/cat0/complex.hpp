#pragma once

#include <array>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cat0/geometry.hpp"
#include "cat0/link_graph.hpp"

namespace cat0 {

// A finite 2-dimensional polyhedral complex with Euclidean metric: every face
// is a triangle carrying canonical planar coordinates ("frame").  Rectangular
// complexes are ingested by splitting each rectangle along a diagonal; the
// `rect` field remembers the provenance.
struct PolyComplex2D {
  struct Edge {
    std::string id;
    int v0 = -1;
    int v1 = -1;
    double length = 0.0;
    std::vector<int> faces;
  };

  struct Face {
    std::string id;
    std::array<int, 3> v{{-1, -1, -1}};   // corners, counterclockwise in the frame
    std::array<int, 3> e{{-1, -1, -1}};   // e[k] joins v[k] and v[(k+1)%3]
    std::array<Vec2, 3> frame{};          // corner coordinates
    int rect = -1;
  };

  std::vector<std::string> vertex_ids;
  std::vector<Edge> edges;
  std::vector<Face> faces;
  std::unordered_map<std::string, int> vertex_index;
  std::unordered_map<std::string, int> edge_index;
  std::unordered_map<std::string, int> face_index;
  std::vector<std::vector<int>> vertex_edges;
  std::vector<std::vector<int>> vertex_faces;

  int vertex(const std::string& id) const;
  int edge(const std::string& id) const;
  int face(const std::string& id) const;

  int corner_of(int f, int v) const;                 // corner index or -1
  int side_of(int f, int e) const;                   // first matching side or -1
  std::array<int, 2> side_corners(int f, int s) const {
    return {faces[f].v[s], faces[f].v[(s + 1) % 3]};
  }
  double corner_angle(int f, int corner) const;
  double side_length(int f, int s) const;

  // Position on side `s` of face `f` at fraction `u` in [0, 1] measured from
  // corner s toward corner s+1.
  Vec2 side_point(int f, int s, double u) const;
  // Convert a fraction along the side into the edge's own parameter
  // (measured from edge.v0) and back.
  double edge_param_from_side(int f, int s, double u) const;
  double side_param_from_edge(int f, int s, double t) const;
};

struct EdgeSpec {
  std::string id;
  std::string v0, v1;
  double length = 0.0;
};

struct FaceSpec {
  std::string id;
  std::array<std::string, 3> edges;
};

struct RectSpec {
  std::string id;
  std::array<std::string, 4> edges;  // edges[k] joins corner k and corner k+1
  double width = 0.0;                // length of edges 0 and 2
  double height = 0.0;               // length of edges 1 and 3
};

PolyComplex2D build_triangulated(const std::vector<std::string>& vertices,
                                 const std::vector<EdgeSpec>& edges,
                                 const std::vector<FaceSpec>& faces);

// Vertices are synthesized from the edge identifications: corner k of a
// rectangle sits between its edges k-1 and k (cyclically), and an edge shared
// by two rectangles is traversed in opposite directions by them.  An edge
// used more than twice glues every later occurrence to the first.
PolyComplex2D build_rectangular(const std::vector<RectSpec>& rects);

// Link of a vertex: one node per incident edge (node ids are edge ids), one
// arc per incident face corner, weighted by the interior angle.
LinkGraph vertex_link(const PolyComplex2D& c, int v);

struct Cat0Report {
  bool ok = false;
  bool connected = false;
  bool simply_connected = false;
  struct LinkViolation {
    int vertex = -1;
    double girth = 0.0;
    std::vector<std::string> cycle_faces;
  };
  std::vector<LinkViolation> violations;  // vertices whose link girth < 2*pi
  std::string message;
};

// CAT(0) test: connected, trivial first homology over GF(2), and every vertex
// link has girth >= 2*pi (within k_eps).
Cat0Report validate_cat0(const PolyComplex2D& c);

// Transform from face f's frame to face g's frame across their shared edge e.
// f and g may coincide when the edge bounds the same face twice.
Iso2 glue_transform(const PolyComplex2D& c, int f, int g, int e);

struct MeshPoint {
  enum class Kind { vertex, edge, face };
  Kind kind = Kind::vertex;
  int index = -1;
  double t = 0.0;  // edge parameter from edge.v0
  Vec2 xy;         // face frame coordinates

  static MeshPoint at_vertex(int v) { return {Kind::vertex, v, 0.0, {}}; }
  static MeshPoint at_edge(int e, double t) { return {Kind::edge, e, t, {}}; }
  static MeshPoint at_face(int f, Vec2 xy) { return {Kind::face, f, 0.0, xy}; }
};

// Coordinates of `p` in the frame of face `f`; fails with Errc::not_adjacent
// when the point does not lie on (the closure of) that face.
Vec2 locate_in_face(const PolyComplex2D& c, const MeshPoint& p, int f);

// All faces whose closure contains the point.
std::vector<int> faces_of(const PolyComplex2D& c, const MeshPoint& p);

// Checks coordinates are inside the face / parameter range (within tol).
void validate_point(const PolyComplex2D& c, const MeshPoint& p, double tol = k_eps);

// A piecewise-straight path.  Face segments carry the face and frame
// coordinates; stretches that run along an edge set `edge` (>= 0) with a/b
// still in the frame of `face` when one exists (face == -1 for bare edges,
// with a,b on the x-axis scaled by edge length).
struct GeodesicPath {
  struct Seg {
    int face = -1;
    int edge = -1;
    Vec2 a, b;
  };
  struct Crossing {
    int edge = -1;
    double t = 0.0;
  };
  double length = 0.0;
  std::vector<Seg> segs;
  std::vector<Crossing> crossings;   // transversal crossings, in path order
  std::vector<int> vertices;         // interior vertices passed through

  MeshPoint point_at(const PolyComplex2D& c, double s, double tol = 1e-9) const;
};

}  // namespace cat0
