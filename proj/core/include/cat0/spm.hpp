#pragma once

#include <array>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cat0/complex.hpp"
#include "cat0/geometry.hpp"
#include "cat0/link_graph.hpp"

namespace cat0 {

// The ruffle of a vertex: the part of the vertex link at distance >= pi from
// the incoming direction, i.e. the directions a shortest path may continue in
// after passing through the vertex.  Intervals are per link arc; each arc
// meets the ruffle in at most one interval because arc weights (triangle
// corner angles) are below pi.
struct Ruffle {
  int vertex = -1;
  LinkPoint incoming;
  bool whole_link = false;  // source vertex: no incoming constraint

  struct Interval {
    int arc = -1;
    double lo = 0.0, hi = 0.0;  // offsets from the arc's `a` end, lo <= hi
  };
  struct BoundaryRay {
    int arc = -1;
    double offset = 0.0;  // link distance from the incoming direction is exactly pi
    int face = -1;        // the ray lifted into the complex (face frame)
    Vec2 origin, dir;
  };

  std::vector<Interval> intervals;  // nonempty intersections only
  std::vector<int> nodes;           // link nodes (edge directions) at >= pi
  std::vector<BoundaryRay> rays;
};

// Link-level computation; `link` must be vertex_link(c, v).  Pass nullopt as
// the incoming direction for the source vertex (the ruffle is the whole link).
Ruffle ruffle(const LinkGraph& link, int v, const std::optional<LinkPoint>& incoming);
// Same, but also lifts the boundary rays into face frames.
Ruffle ruffle(const PolyComplex2D& c, int v, const std::optional<LinkPoint>& incoming);

// One branch of a boundary tree.  A boundary ray starts at a ruffle boundary
// (its tree's root) and keeps its identity while crossing ordinary two-face
// edges; an edge with more incident faces splits it into one child branch per
// continuation face.
struct BoundaryBranch {
  int tree = -1;         // index of the root branch
  int parent = -1;       // -1 at roots
  int root_vertex = -1;  // the vertex whose ruffle the tree grows from
  struct Seg {
    int face = -1;
    Vec2 origin, dir;  // in the face frame
  };
  std::vector<Seg> segs;  // consecutive faces the branch crosses
  int children = 0;
};

// A region of the shortest path map.  Every shortest path into a
// 2-dimensional region runs through sigma(s, apex_vertex) and then straight
// from the apex, so the region is the intersection of its face with a wedge
// whose apex has been unfolded into the face's frame.
struct SPMRegion {
  int dim = 2;
  int face = -1;         // dim 2: owning face
  int vertex = -1;       // dim 0: the vertex
  int edge = -1;         // dim 1: the edge; paths run along it
  int from_vertex = -1;  // dim 1: ... away from this endpoint

  int apex_vertex = -1;
  double apex_dist = 0.0;  // d(s, apex_vertex)
  Vec2 apex;               // apex position unfolded into the face frame
  Vec2 dir_a, dir_b;       // wedge boundary directions, counterclockwise a -> b

  // Boundary-tree branches carrying the two wedge sides; -1 when the side
  // runs along an edge of the face.  A side is closed (belongs to the region)
  // while it is still the ruffle boundary of the region's own apex; once the
  // boundary is determined by a later vertex the side is open.
  int branch_a = -1, branch_b = -1;
  bool closed_a = false, closed_b = false;

  int entry_edge = -1;  // -1: entered at the apex vertex itself
  double entry_lo = 0.0, entry_hi = 0.0;  // edge parameters (from edge.v0)
  int entry_face = -1;
  int entry_region = -1;

  struct Exit {
    int edge = -1;
    double lo = 0.0, hi = 0.0;
  };
  std::vector<Exit> exits;  // <= 2 edge segments
  int exit_vertex = -1;     // <= 1 vertex strictly inside the wedge
};

struct ShortestPathMap {
  // The complex the map was built on.  A source interior to a face or an edge
  // splits the incident faces first, so this may differ from the input.
  PolyComplex2D complex;
  int source = -1;  // vertex index in `complex`

  std::vector<SPMRegion> regions;
  std::vector<std::vector<int>> face_regions;  // per face: 2D regions, creation order
  std::vector<BoundaryBranch> branches;
  std::vector<LinkGraph> links;  // vertex links, indexed by vertex

  struct VertexState {
    bool reached = false;
    double dist = 0.0;
    int parent = -1;      // previous bend vertex (-1 at the source)
    int along_edge = -1;  // >= 0: the final leg runs along this edge
    int via_region = -1;  // >= 0: the 2-dimensional region claiming the vertex
    LinkPoint incoming;   // arrival direction in the vertex link
    double hop = 0.0;     // length of the final straight leg
  };
  std::vector<VertexState> vertices;

  // Bookkeeping anomalies (duplicate claims that disagree, entry-lemma
  // violations seen during construction).  Empty on sound inputs.
  std::vector<std::string> conflicts;

  GeodesicPath sigma(int v) const;  // sigma(source, v)
  // sigma(source, v) laid out in the plane: straight through edge crossings,
  // bends of magnitude (link angle - pi) at intermediate vertices (turn side
  // is not represented).
  std::vector<Vec2> sigma_polyline(int v) const;
};

struct SpmOptions {
  long region_cap = 1000000;
};

// Frontier algorithm, working outwards from the source.  FIFO order over
// frontier vertices and edge segments; geodesic uniqueness makes the order
// irrelevant to the result, FIFO keeps runs reproducible.
ShortestPathMap build_spm(const PolyComplex2D& c, const MeshPoint& source,
                          const SpmOptions& opt = {});

// The last step shortest path map: constant information per vertex, edge and
// face, sufficient to recover any shortest path by unfolding.
struct LastStepMap {
  int source = -1;

  struct EdgeIncoming {
    enum class Kind { unreached, along, face } kind = Kind::unreached;
    int from_vertex = -1;  // along: paths run away from this endpoint
    int face = -1;         // face: the one incident face paths arrive through
  };

  struct VertexIncoming {
    enum class Kind { unreached, source, along, face } kind = Kind::unreached;
    int edge = -1;        // along: the edge the final leg runs on
    int face = -1;        // face: holds the final segment of sigma(s, v)
    int entry_edge = -1;  // face: edge that segment crosses into the face (-1:
                          // it starts at a corner of the face)
    Vec2 seg_from;        // face: start of that segment, face frame
    double dist = 0.0;
  };

  // Face types follow the entry lemma: paths enter through one edge (E), one
  // vertex (V), an edge and an incident vertex (EV), or two edges and their
  // common vertex (EVE).
  struct FaceIncoming {
    enum class Type { unreached, E, V, EV, EVE } type = Type::unreached;
    int vertex = -1;                      // V / EV / EVE
    std::array<int, 2> edges{{-1, -1}};   // entry edges (E: [0]; EVE: both)
    Vec2 apex;                            // corner position of `vertex`
    Vec2 wedge_a, wedge_b;                // vertex cone, ccw, face frame
    int beyond_a = -1, beyond_b = -1;     // entry edge past each wedge side
  };

  std::vector<EdgeIncoming> edges;
  std::vector<VertexIncoming> vertices;
  std::vector<FaceIncoming> faces;

  // Stored-slot tally: at most 6 per face, 3 per edge, 1 per vertex.
  long item_count() const;
};

LastStepMap derive_last_step(const ShortestPathMap& spm);

// Recovers sigma(source, t) from the last step map alone by walking incoming
// information backwards and unfolding along the way.  Throws
// Errc::unknown_location when the map has no information for the location.
GeodesicPath query_path(const PolyComplex2D& c, const LastStepMap& lsm, const MeshPoint& t);

// Test oracle: enumerate every simple face-edge corridor from s to t (up to
// max_faces faces), compute the locally shortest path through each by
// unfolding, keep candidates whose bends satisfy the >= pi angle condition,
// and return the shortest.  Throws Errc::depth_exceeded when no corridor
// within the budget reaches t.
GeodesicPath brute_force_geodesic(const PolyComplex2D& c, const MeshPoint& s, const MeshPoint& t,
                                  int max_faces = 12);

struct EntryReport {
  bool ok = true;
  std::vector<std::string> issues;
};

// Post-construction sanity pass over the entry lemmas: each edge has one
// incoming tag, each face one of the four entry types with entry edges
// incident to the entry vertex.
EntryReport verify_entry_lemmas(const ShortestPathMap& spm);

struct BranchCounts {
  struct Tree {
    int root_branch = -1;
    int root_vertex = -1;
    int branches = 0;
    int leaves = 0;
    int max_face_entries = 0;  // times branches of this tree cross one face
  };
  std::vector<Tree> trees;
  int max_leaves = 0;
  int max_face_entries = 0;
};

BranchCounts branch_counts(const ShortestPathMap& spm);

}  // namespace cat0
