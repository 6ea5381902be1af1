#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cat0 {

// Metric multigraph recording the directions around a vertex: one node per
// incident edge (or ray), one arc per incident face corner, weighted by the
// corner's interior angle.  Parallel arcs and, in degenerate inputs,
// self-loops are both meaningful, hence arcs are stored explicitly instead of
// an adjacency matrix.
struct LinkGraph {
  struct Arc {
    int a = -1;
    int b = -1;
    double w = 0.0;
    int face = -1;  // caller-defined payload (face or cone index)
  };

  std::vector<std::string> node_ids;
  std::vector<Arc> arcs;
  std::vector<std::vector<int>> adj;  // node -> incident arc indices

  int add_node(std::string id);
  int add_arc(int a, int b, double w, int face = -1);
  void finish();  // builds adj; call after the last add_arc
  int node_count() const { return static_cast<int>(node_ids.size()); }
  int other_end(int arc, int node) const;
};

// A position on the link: either a node, or the interior of an arc at
// `offset` from the arc's `a` end.
struct LinkPoint {
  int node = -1;
  int arc = -1;
  double offset = 0.0;

  bool is_node() const { return node >= 0; }
  static LinkPoint at_node(int n) { return {n, -1, 0.0}; }
  static LinkPoint on_arc(int arc, double offset) { return {-1, arc, offset}; }
};

// Shortest path between two link points.  `nodes` lists every graph node
// visited in order (the endpoint itself when that endpoint is a node).
// `arcs` lists the arcs between consecutive stops, including the partial arc
// pieces at interior endpoints; `lead`/`trail` give the lengths of those
// partial pieces (0 when the endpoint is a node).  A path that stays inside a
// single arc has empty `nodes`, one arc, and lead == length.
struct LinkPath {
  double length = 0.0;
  std::vector<int> nodes;
  std::vector<int> arcs;
  double lead = 0.0;
  double trail = 0.0;
};

struct LinkSearch {
  std::vector<double> dist;        // +inf where unreached
  std::vector<int> parent_arc;     // -1 at seeds
  std::vector<int> parent_node;    // -1 at seeds
};

// Multi-source Dijkstra; nodes whose distance exceeds `radius` are not
// expanded further (their own distance is still recorded if reached).
LinkSearch link_search(const LinkGraph& g, const std::vector<std::pair<int, double>>& seeds,
                       double radius);

std::vector<std::pair<int, double>> link_seeds(const LinkGraph& g, const LinkPoint& p);

// Distance between two link points, capped at `radius` (nullopt beyond it).
std::optional<double> link_distance(const LinkGraph& g, const LinkPoint& a, const LinkPoint& b,
                                    double radius);

std::optional<LinkPath> shortest_link_path(const LinkGraph& g, const LinkPoint& a,
                                           const LinkPoint& b, double radius);

// Every path of length <= shortest + tie_tol, up to `cap` of them (shortest
// first is not guaranteed; all returned paths are within the tolerance).
std::vector<LinkPath> all_shortest_link_paths(const LinkGraph& g, const LinkPoint& a,
                                              const LinkPoint& b, double radius, double tie_tol,
                                              int cap);

// Weight of the shortest cycle (girth in the metric sense), handling parallel
// arcs and self-loops.  nullopt for forests.  `witness_arcs` receives the
// arcs of one optimal cycle when non-null.
std::optional<double> shortest_link_cycle(const LinkGraph& g,
                                          std::vector<int>* witness_arcs = nullptr);

}  // namespace cat0
