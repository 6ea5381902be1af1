#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cat0/geometry.hpp"
#include "cat0/link_graph.hpp"

namespace cat0 {

struct ConeSpec {
  std::string id;
  std::string r0, r1;
  double angle = 0.0;  // in (0, pi]
};

// Complex with a single vertex O: rays leave O, and every 2-cell is an
// angular cone between two rays.  The link graph has one node per ray and one
// arc per cone; the whole geometry of the space is that graph plus radii.
struct SingleVertexComplex {
  struct Cone {
    std::string id;
    int r0 = -1;
    int r1 = -1;
    double angle = 0.0;
  };

  std::vector<std::string> ray_ids;
  std::vector<Cone> cones;
  LinkGraph link;  // arc payload = cone index
  std::unordered_map<std::string, int> ray_index;
  std::unordered_map<std::string, int> cone_index;

  int ray(const std::string& id) const;
  int cone(const std::string& id) const;
};

// Throws Errc::not_cat0 when some link cycle is shorter than 2*pi.
SingleVertexComplex build_single_vertex(const std::vector<std::string>& rays,
                                        const std::vector<ConeSpec>& cones);

struct ConePoint {
  bool origin = false;
  LinkPoint direction;  // meaningless when origin
  double radius = 0.0;

  static ConePoint at_origin() { return {true, {}, 0.0}; }
  static ConePoint on_ray(int ray, double r) { return {false, LinkPoint::at_node(ray), r}; }
  static ConePoint in_cone(int cone, double angle_from_first, double r) {
    return {false, LinkPoint::on_arc(cone, angle_from_first), r};
  }
};

// Errc::point_not_in_complex on out-of-range rays/cones, angles outside the
// cone, or nonpositive radius.
void validate_point(const SingleVertexComplex& c, const ConePoint& p);

// Property 1 classification: the finite value when the link distance is
// strictly below pi; nullopt (AtLeastPi) otherwise.  Distances within k_eps
// of pi take the AtLeastPi branch.
std::optional<double> link_distance_lt_pi(const SingleVertexComplex& c, const LinkPoint& a,
                                          const LinkPoint& b);

struct GeodesicResult {
  double length = 0.0;
  bool through_origin = false;
  std::vector<std::pair<int, double>> crossings;  // (ray, distance from O), in path order
  std::optional<double> link_dist;                // set when < pi
  std::optional<LinkPath> link_path;
};

GeodesicResult geodesic(const SingleVertexComplex& c, const ConePoint& a, const ConePoint& b);

struct OriginHullWitness {
  enum class Kind { none, origin_point, pair, cycle };
  Kind kind = Kind::none;
  int index0 = -1;  // point index (origin_point, pair)
  int index1 = -1;
  double pair_distance = 0.0;  // +inf when the pair is further than the search radius
  std::vector<int> cycle_arcs;  // link arcs (= cones) carrying the cycle
};

struct OriginHullResult {
  bool in_hull = false;
  OriginHullWitness witness;
};

// O is in the convex hull of P iff O is a point of P, or some pair of
// directions is at link distance >= pi, or G[P] contains a cycle.  The pair
// witness is the qualifying pair of smallest distance (lexicographic on
// indices among ties).
OriginHullResult origin_in_hull(const SingleVertexComplex& c, const std::vector<ConePoint>& pts);

// G[P]: the union of all pairwise shortest link paths between the directions
// of P, as maximal arc fragments plus the breakpoint multigraph summary.
// Paths tied within 1e-9 all contribute.
struct LinkSubset {
  struct Fragment {
    int arc = -1;
    double lo = 0.0, hi = 0.0;  // offsets along the arc, lo <= hi
  };
  std::vector<Fragment> fragments;
  std::vector<int> nodes;          // link nodes touched by the subset
  int breakpoint_nodes = 0;
  int breakpoint_edges = 0;
  bool has_cycle = false;
  std::vector<int> cycle_arcs;
};

// Errc::pair_at_least_pi when some pair of directions is >= pi apart.
LinkSubset build_gp(const SingleVertexComplex& c, const std::vector<ConePoint>& pts);

// The rays that can support the hull: closure of the P-directions under
// taking nodes of (tied) shortest link paths of length < pi between elements,
// iterated to a fixpoint.  Returns sorted ray indices.
std::vector<int> hull_edge_support(const SingleVertexComplex& c,
                                   const std::vector<ConePoint>& pts);

}  // namespace cat0
