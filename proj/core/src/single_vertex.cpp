#include "cat0/single_vertex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "cat0/errors.hpp"
#include "cat0/log.hpp"

namespace cat0 {

namespace {

constexpr double k_inf = std::numeric_limits<double>::infinity();
constexpr double k_tie_tol = 1e-9;
constexpr int k_tie_cap = 64;

int lookup(const std::unordered_map<std::string, int>& m, const std::string& id,
           const char* what) {
  auto it = m.find(id);
  if (it == m.end()) fail(Errc::malformed_input, std::string("unknown ") + what + " '" + id + "'");
  return it->second;
}

}  // namespace

int SingleVertexComplex::ray(const std::string& id) const { return lookup(ray_index, id, "ray"); }
int SingleVertexComplex::cone(const std::string& id) const { return lookup(cone_index, id, "cone"); }

SingleVertexComplex build_single_vertex(const std::vector<std::string>& rays,
                                        const std::vector<ConeSpec>& cones) {
  SingleVertexComplex c;
  for (const auto& id : rays) {
    if (!c.ray_index.emplace(id, c.ray_ids.size()).second)
      fail(Errc::malformed_input, "duplicate ray id '" + id + "'");
    c.ray_ids.push_back(id);
    c.link.add_node(id);
  }
  for (const auto& cs : cones) {
    if (!(cs.angle > 0) || cs.angle > k_pi + k_eps)
      fail(Errc::malformed_input, "cone '" + cs.id + "' angle must lie in (0, pi]");
    SingleVertexComplex::Cone cone;
    cone.id = cs.id;
    cone.r0 = lookup(c.ray_index, cs.r0, "ray");
    cone.r1 = lookup(c.ray_index, cs.r1, "ray");
    cone.angle = std::min(cs.angle, k_pi);
    if (!c.cone_index.emplace(cs.id, c.cones.size()).second)
      fail(Errc::malformed_input, "duplicate cone id '" + cs.id + "'");
    c.link.add_arc(cone.r0, cone.r1, cone.angle, static_cast<int>(c.cones.size()));
    c.cones.push_back(std::move(cone));
  }
  c.link.finish();
  if (auto girth = shortest_link_cycle(c.link); girth && *girth < 2 * k_pi - k_eps) {
    std::ostringstream msg;
    msg << "link cycle of length " << *girth << " < 2*pi";
    fail(Errc::not_cat0, msg.str());
  }
  return c;
}

void validate_point(const SingleVertexComplex& c, const ConePoint& p) {
  if (p.origin) return;
  if (!(p.radius > 0)) fail(Errc::point_not_in_complex, "point radius must be positive");
  const LinkPoint& d = p.direction;
  if (d.is_node()) {
    if (d.node >= static_cast<int>(c.ray_ids.size()))
      fail(Errc::point_not_in_complex, "ray index out of range");
    return;
  }
  if (d.arc < 0 || d.arc >= static_cast<int>(c.cones.size()))
    fail(Errc::point_not_in_complex, "cone index out of range");
  if (d.offset < -k_eps || d.offset > c.cones[d.arc].angle + k_eps)
    fail(Errc::point_not_in_complex, "angle lies outside its cone");
}

std::optional<double> link_distance_lt_pi(const SingleVertexComplex& c, const LinkPoint& a,
                                          const LinkPoint& b) {
  const auto d = link_distance(c.link, a, b, k_pi + 1e-6);
  if (!d || *d >= k_pi - k_eps) return std::nullopt;
  return d;
}

GeodesicResult geodesic(const SingleVertexComplex& c, const ConePoint& a, const ConePoint& b) {
  validate_point(c, a);
  validate_point(c, b);
  GeodesicResult r;
  if (a.origin || b.origin) {
    r.through_origin = true;
    r.length = a.radius + b.radius;
    return r;
  }
  const auto d = link_distance_lt_pi(c, a.direction, b.direction);
  if (!d) {
    r.through_origin = true;
    r.length = a.radius + b.radius;
    return r;
  }
  r.link_dist = *d;
  r.length = std::sqrt(std::max(
      0.0, a.radius * a.radius + b.radius * b.radius - 2 * a.radius * b.radius * std::cos(*d)));
  auto path = shortest_link_path(c.link, a.direction, b.direction, k_pi + 1e-6);
  if (!path) fail(Errc::domain_error, "internal: finite distance without a path");

  // Unfold the cone sequence: O at the origin, a's direction along +x, each
  // stop at its cumulative link angle.  The geodesic is the planar chord.
  const Vec2 pa{a.radius, 0.0};
  const Vec2 pb = b.radius * unit_dir(*d);
  if (!path->nodes.empty()) {
    double phi = path->lead;
    const size_t mid_begin = a.direction.is_node() ? 0 : 1;
    for (size_t i = 0; i < path->nodes.size(); ++i) {
      if (i > 0) phi += c.link.arcs[path->arcs[mid_begin + i - 1]].w;
      const bool is_endpoint = (a.direction.is_node() && i == 0) ||
                               (b.direction.is_node() && i + 1 == path->nodes.size());
      if (is_endpoint) continue;
      const auto t = ray_segment_hit({0, 0}, unit_dir(phi), pa, pb);
      if (!t) fail(Errc::domain_error, "internal: chord misses an intermediate ray");
      r.crossings.push_back({path->nodes[i], *t});
    }
  }
  r.link_path = std::move(*path);
  return r;
}

namespace {

// Pairwise link distances among the point directions, capped just above pi.
std::vector<std::vector<double>> pair_distances(const SingleVertexComplex& c,
                                                const std::vector<LinkPoint>& dirs) {
  const double radius = k_pi + 1e-6;
  const size_t n = dirs.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const auto dij = link_distance(c.link, dirs[i], dirs[j], radius);
      d[i][j] = d[j][i] = dij ? *dij : k_inf;
    }
  }
  return d;
}

struct FragmentAccum {
  // Per-arc interval lists, later merged.
  std::vector<std::vector<std::pair<double, double>>> by_arc;
  std::vector<char> node_touched;

  FragmentAccum(size_t arcs, size_t nodes) : by_arc(arcs), node_touched(nodes, 0) {}

  void add_interval(int arc, double lo, double hi) {
    if (lo > hi) std::swap(lo, hi);
    by_arc[arc].push_back({lo, hi});
  }
  void add_path(const LinkGraph& g, const LinkPoint& a, const LinkPoint& b, const LinkPath& p) {
    for (int n : p.nodes) node_touched[n] = 1;
    if (p.nodes.empty()) {  // stays inside one arc
      if (!a.is_node() && !b.is_node() && a.arc == b.arc) {
        add_interval(a.arc, std::min(a.offset, b.offset), std::max(a.offset, b.offset));
      }
      return;
    }
    size_t arc_i = 0;
    if (!a.is_node()) {
      const auto& arc = g.arcs[p.arcs[arc_i]];
      const int first = p.nodes.front();
      add_interval(a.arc, first == arc.a ? 0.0 : a.offset, first == arc.a ? a.offset : arc.w);
      ++arc_i;
    }
    for (size_t i = 0; i + 1 < p.nodes.size(); ++i, ++arc_i) {
      add_interval(p.arcs[arc_i], 0.0, g.arcs[p.arcs[arc_i]].w);
    }
    if (!b.is_node()) {
      const auto& arc = g.arcs[p.arcs[arc_i]];
      const int last = p.nodes.back();
      add_interval(b.arc, last == arc.a ? 0.0 : b.offset, last == arc.a ? b.offset : arc.w);
    }
  }
};

}  // namespace

LinkSubset build_gp(const SingleVertexComplex& c, const std::vector<ConePoint>& pts) {
  std::vector<LinkPoint> dirs;
  for (const auto& p : pts) {
    validate_point(c, p);
    if (p.origin) fail(Errc::domain_error, "G[P] is undefined for the origin point");
    dirs.push_back(p.direction);
  }
  FragmentAccum acc(c.link.arcs.size(), c.link.node_ids.size());
  for (const auto& d : dirs) {
    if (d.is_node()) acc.node_touched[d.node] = 1;
  }
  for (size_t i = 0; i < dirs.size(); ++i) {
    for (size_t j = i + 1; j < dirs.size(); ++j) {
      const auto paths =
          all_shortest_link_paths(c.link, dirs[i], dirs[j], k_pi + 1e-6, k_tie_tol, k_tie_cap);
      if (paths.empty() || paths.front().length >= k_pi - k_eps)
        fail(Errc::pair_at_least_pi, "a pair of directions is at link distance >= pi");
      for (const auto& p : paths) acc.add_path(c.link, dirs[i], dirs[j], p);
    }
  }

  LinkSubset gp;
  // Merge intervals and register breakpoints.  Breakpoint node keys: link
  // nodes as-is; interior endpoints bucketed per arc with 1e-9 slack.
  struct Breakpoints {
    std::vector<int> uf;
    int find(int x) {
      while (uf[x] != x) x = uf[x] = uf[uf[x]];
      return x;
    }
    void unite(int a, int b) {
      a = find(a);
      b = find(b);
      if (a != b) uf[b] = a;
    }
    int add() {
      uf.push_back(static_cast<int>(uf.size()));
      return static_cast<int>(uf.size()) - 1;
    }
  } bp;
  std::vector<int> node_bp(c.link.node_ids.size(), -1);
  auto node_key = [&](int n) {
    if (node_bp[n] < 0) node_bp[n] = bp.add();
    return node_bp[n];
  };
  std::vector<std::vector<std::pair<double, int>>> interior(c.link.arcs.size());
  auto interior_key = [&](int arc, double off) {
    for (auto& [o, key] : interior[arc]) {
      if (std::fabs(o - off) <= k_tie_tol) return key;
    }
    interior[arc].push_back({off, bp.add()});
    return interior[arc].back().second;
  };
  auto endpoint_key = [&](int arc, double off) {
    const auto& a = c.link.arcs[arc];
    if (off <= k_tie_tol) return node_key(a.a);
    if (off >= a.w - k_tie_tol) return node_key(a.b);
    return interior_key(arc, off);
  };

  std::vector<std::pair<int, int>> frag_ends;  // breakpoint keys per fragment
  for (int arc = 0; arc < static_cast<int>(acc.by_arc.size()); ++arc) {
    auto& ivs = acc.by_arc[arc];
    if (ivs.empty()) continue;
    std::sort(ivs.begin(), ivs.end());
    double lo = ivs[0].first, hi = ivs[0].second;
    auto flush = [&] {
      gp.fragments.push_back({arc, lo, hi});
      frag_ends.push_back({endpoint_key(arc, lo), endpoint_key(arc, hi)});
    };
    for (size_t i = 1; i < ivs.size(); ++i) {
      if (ivs[i].first <= hi + 1e-12) {
        hi = std::max(hi, ivs[i].second);
      } else {
        flush();
        lo = ivs[i].first;
        hi = ivs[i].second;
      }
    }
    flush();
  }
  for (int n = 0; n < static_cast<int>(c.link.node_ids.size()); ++n) {
    if (acc.node_touched[n]) {
      gp.nodes.push_back(n);
      node_key(n);
    }
  }

  gp.breakpoint_nodes = static_cast<int>(bp.uf.size());
  gp.breakpoint_edges = static_cast<int>(frag_ends.size());
  // A component is cyclic iff it has at least as many fragment edges as
  // breakpoint nodes.
  for (auto [a, b] : frag_ends) bp.unite(a, b);
  std::vector<int> comp_nodes(bp.uf.size(), 0), comp_edges(bp.uf.size(), 0);
  for (int i = 0; i < static_cast<int>(bp.uf.size()); ++i) ++comp_nodes[bp.find(i)];
  for (size_t f = 0; f < frag_ends.size(); ++f) ++comp_edges[bp.find(frag_ends[f].first)];
  std::vector<char> comp_cyclic(bp.uf.size(), 0);
  for (size_t i = 0; i < bp.uf.size(); ++i) {
    if (comp_edges[i] >= comp_nodes[i] && comp_edges[i] > 0) comp_cyclic[i] = 1;
  }
  for (size_t f = 0; f < frag_ends.size(); ++f) {
    if (comp_cyclic[bp.find(frag_ends[f].first)]) {
      gp.has_cycle = true;
      gp.cycle_arcs.push_back(gp.fragments[f].arc);
    }
  }
  std::sort(gp.cycle_arcs.begin(), gp.cycle_arcs.end());
  gp.cycle_arcs.erase(std::unique(gp.cycle_arcs.begin(), gp.cycle_arcs.end()),
                      gp.cycle_arcs.end());
  return gp;
}

OriginHullResult origin_in_hull(const SingleVertexComplex& c, const std::vector<ConePoint>& pts) {
  if (pts.empty()) fail(Errc::domain_error, "origin_in_hull requires a nonempty point set");
  OriginHullResult r;
  for (size_t i = 0; i < pts.size(); ++i) {
    validate_point(c, pts[i]);
    if (pts[i].origin) {
      r.in_hull = true;
      r.witness.kind = OriginHullWitness::Kind::origin_point;
      r.witness.index0 = static_cast<int>(i);
      return r;
    }
  }
  std::vector<LinkPoint> dirs;
  dirs.reserve(pts.size());
  for (const auto& p : pts) dirs.push_back(p.direction);
  const auto d = pair_distances(c, dirs);

  int bi = -1, bj = -1;
  double bd = k_inf;
  for (size_t i = 0; i < dirs.size(); ++i) {
    for (size_t j = i + 1; j < dirs.size(); ++j) {
      if (d[i][j] < k_pi - k_eps) continue;
      if (bi < 0 || d[i][j] < bd - 1e-12) {
        bi = static_cast<int>(i);
        bj = static_cast<int>(j);
        bd = d[i][j];
      }
    }
  }
  if (bi >= 0) {
    r.in_hull = true;
    r.witness.kind = OriginHullWitness::Kind::pair;
    r.witness.index0 = bi;
    r.witness.index1 = bj;
    r.witness.pair_distance = bd;
    return r;
  }

  const LinkSubset gp = build_gp(c, pts);
  if (gp.has_cycle) {
    r.in_hull = true;
    r.witness.kind = OriginHullWitness::Kind::cycle;
    r.witness.cycle_arcs = gp.cycle_arcs;
  }
  return r;
}

std::vector<int> hull_edge_support(const SingleVertexComplex& c,
                                   const std::vector<ConePoint>& pts) {
  if (pts.empty()) fail(Errc::domain_error, "hull_edge_support requires a nonempty point set");
  // Closure elements: the point directions, then every ray node reached.
  // Processing an element pairs it with all previously processed ones and
  // marks every node lying on a (tied) shortest path of length < pi.
  std::vector<LinkPoint> elems;
  std::vector<char> node_in(c.link.node_ids.size(), 0);
  auto push_node = [&](int n) {
    if (!node_in[n]) {
      node_in[n] = 1;
      elems.push_back(LinkPoint::at_node(n));
    }
  };
  for (const auto& p : pts) {
    validate_point(c, p);
    if (p.origin) continue;  // the origin constrains nothing directionally
    if (p.direction.is_node()) {
      push_node(p.direction.node);
    } else {
      elems.push_back(p.direction);
    }
  }

  std::vector<LinkSearch> searches;
  std::vector<std::vector<std::pair<int, double>>> seeds;
  for (size_t i = 0; i < elems.size(); ++i) {  // elems grows inside the loop
    seeds.push_back(link_seeds(c.link, elems[i]));
    searches.push_back(link_search(c.link, seeds[i], k_pi + 1e-6));
    for (size_t j = 0; j < i; ++j) {
      double dij = k_inf;
      for (auto [n, cost] : seeds[j]) dij = std::min(dij, searches[i].dist[n] + cost);
      if (!elems[i].is_node() && !elems[j].is_node() && elems[i].arc == elems[j].arc)
        dij = std::min(dij, std::fabs(elems[i].offset - elems[j].offset));
      if (dij >= k_pi - k_eps) continue;
      for (int u = 0; u < c.link.node_count(); ++u) {
        if (node_in[u]) continue;
        if (searches[i].dist[u] + searches[j].dist[u] <= dij + k_tie_tol) push_node(u);
      }
    }
  }

  std::vector<int> b;
  for (int n = 0; n < c.link.node_count(); ++n) {
    if (node_in[n]) b.push_back(n);
  }
  return b;
}

}  // namespace cat0
