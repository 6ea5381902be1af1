#include "cat0/link_graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>

#include "cat0/errors.hpp"

namespace cat0 {

namespace {

constexpr double k_inf = std::numeric_limits<double>::infinity();

}  // namespace

int LinkGraph::add_node(std::string id) {
  node_ids.push_back(std::move(id));
  return static_cast<int>(node_ids.size()) - 1;
}

int LinkGraph::add_arc(int a, int b, double w, int face) {
  if (a < 0 || a >= node_count() || b < 0 || b >= node_count())
    fail(Errc::domain_error, "link arc endpoint out of range");
  if (!(w > 0.0)) fail(Errc::domain_error, "link arc weight must be positive");
  arcs.push_back({a, b, w, face});
  return static_cast<int>(arcs.size()) - 1;
}

void LinkGraph::finish() {
  adj.assign(node_ids.size(), {});
  for (int i = 0; i < static_cast<int>(arcs.size()); ++i) {
    adj[arcs[i].a].push_back(i);
    if (arcs[i].b != arcs[i].a) adj[arcs[i].b].push_back(i);
  }
}

int LinkGraph::other_end(int arc, int node) const {
  const Arc& a = arcs[arc];
  return a.a == node ? a.b : a.a;
}

std::vector<std::pair<int, double>> link_seeds(const LinkGraph& g, const LinkPoint& p) {
  if (p.is_node()) {
    if (p.node >= g.node_count()) fail(Errc::domain_error, "link point node out of range");
    return {{p.node, 0.0}};
  }
  if (p.arc < 0 || p.arc >= static_cast<int>(g.arcs.size()))
    fail(Errc::domain_error, "link point arc out of range");
  const LinkGraph::Arc& a = g.arcs[p.arc];
  if (p.offset < -1e-12 || p.offset > a.w + 1e-12)
    fail(Errc::domain_error, "link point offset outside its arc");
  const double off = std::clamp(p.offset, 0.0, a.w);
  return {{a.a, off}, {a.b, a.w - off}};
}

namespace {

LinkSearch dijkstra(const LinkGraph& g, const std::vector<std::pair<int, double>>& seeds,
                    double radius, int excluded_arc) {
  LinkSearch r;
  r.dist.assign(g.node_ids.size(), k_inf);
  r.parent_arc.assign(g.node_ids.size(), -1);
  r.parent_node.assign(g.node_ids.size(), -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  for (auto [n, c] : seeds) {
    if (c < r.dist[n]) {
      r.dist[n] = c;
      pq.push({c, n});
    }
  }
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > r.dist[u]) continue;
    if (d > radius) break;
    for (int ai : g.adj[u]) {
      if (ai == excluded_arc) continue;
      const LinkGraph::Arc& a = g.arcs[ai];
      if (a.a == a.b) continue;  // self-loops never shorten node distances
      const int v = g.other_end(ai, u);
      const double nd = d + a.w;
      if (nd < r.dist[v]) {
        r.dist[v] = nd;
        r.parent_arc[v] = ai;
        r.parent_node[v] = u;
        pq.push({nd, v});
      }
    }
  }
  return r;
}

std::optional<double> direct_arc_distance(const LinkPoint& a, const LinkPoint& b) {
  if (a.is_node() || b.is_node() || a.arc != b.arc) return std::nullopt;
  return std::fabs(a.offset - b.offset);
}

}  // namespace

LinkSearch link_search(const LinkGraph& g, const std::vector<std::pair<int, double>>& seeds,
                       double radius) {
  return dijkstra(g, seeds, radius, -1);
}

std::optional<double> link_distance(const LinkGraph& g, const LinkPoint& a, const LinkPoint& b,
                                    double radius) {
  double best = k_inf;
  if (auto d = direct_arc_distance(a, b)) best = *d;
  const LinkSearch s = link_search(g, link_seeds(g, a), radius);
  for (auto [n, c] : link_seeds(g, b)) best = std::min(best, s.dist[n] + c);
  if (best > radius) return std::nullopt;
  return best;
}

std::optional<LinkPath> shortest_link_path(const LinkGraph& g, const LinkPoint& a,
                                           const LinkPoint& b, double radius) {
  const LinkSearch s = link_search(g, link_seeds(g, a), radius);

  double best = k_inf;
  int best_node = -1;
  double best_trail = 0.0;
  for (auto [n, c] : link_seeds(g, b)) {
    if (s.dist[n] + c < best) {
      best = s.dist[n] + c;
      best_node = n;
      best_trail = c;
    }
  }
  const std::optional<double> direct = direct_arc_distance(a, b);
  if (direct && *direct <= best) {
    if (*direct > radius) return std::nullopt;
    LinkPath p;
    p.length = *direct;
    p.arcs = {a.arc};
    p.lead = *direct;
    return p;
  }
  if (best > radius || best_node < 0) return std::nullopt;

  LinkPath p;
  p.length = best;
  for (int n = best_node; n >= 0; n = s.parent_node[n]) {
    p.nodes.push_back(n);
    if (s.parent_arc[n] >= 0) p.arcs.push_back(s.parent_arc[n]);
    if (s.parent_node[n] < 0) break;
  }
  std::reverse(p.nodes.begin(), p.nodes.end());
  std::reverse(p.arcs.begin(), p.arcs.end());
  if (!a.is_node()) {
    p.lead = s.dist[p.nodes.front()];
    p.arcs.insert(p.arcs.begin(), a.arc);
  }
  if (!b.is_node()) {
    p.trail = best_trail;
    p.arcs.push_back(b.arc);
  }
  return p;
}

std::vector<LinkPath> all_shortest_link_paths(const LinkGraph& g, const LinkPoint& a,
                                              const LinkPoint& b, double radius, double tie_tol,
                                              int cap) {
  std::vector<LinkPath> out;
  const auto seeds_a = link_seeds(g, a);
  const auto seeds_b = link_seeds(g, b);
  const LinkSearch s = link_search(g, seeds_a, radius + tie_tol);

  double best = k_inf;
  if (auto d = direct_arc_distance(a, b)) best = *d;
  for (auto [n, c] : seeds_b) best = std::min(best, s.dist[n] + c);
  if (best > radius) return out;

  std::vector<double> seed_cost_a(g.node_ids.size(), k_inf);
  for (auto [n, c] : seeds_a) seed_cost_a[n] = std::min(seed_cost_a[n], c);

  if (auto d = direct_arc_distance(a, b); d && *d <= best + tie_tol) {
    LinkPath p;
    p.length = *d;
    p.arcs = {a.arc};
    p.lead = *d;
    out.push_back(std::move(p));
  }

  // Backward search from b guided by the exact heuristic s.dist: every simple
  // path with total length <= best + tie_tol is visited.
  std::vector<char> on_path(g.node_ids.size(), 0);
  std::vector<int> rev_nodes, rev_arcs;
  double current_trail = 0.0;  // cost of b's partial arc piece for this start

  auto emit = [&](int first_node, double g_cost) {
    LinkPath p;
    p.length = g_cost + seed_cost_a[first_node];
    p.nodes.assign(rev_nodes.rbegin(), rev_nodes.rend());
    p.arcs.assign(rev_arcs.rbegin(), rev_arcs.rend());
    if (!a.is_node()) {
      p.lead = seed_cost_a[first_node];
      p.arcs.insert(p.arcs.begin(), a.arc);
    }
    if (!b.is_node()) {
      p.trail = current_trail;
      p.arcs.push_back(b.arc);
    }
    out.push_back(std::move(p));
  };

  std::function<void(int, double)> dfs = [&](int v, double g_cost) {
    if (static_cast<int>(out.size()) >= cap) return;
    if (s.dist[v] + g_cost > best + tie_tol) return;
    rev_nodes.push_back(v);
    on_path[v] = 1;
    if (seed_cost_a[v] + g_cost <= best + tie_tol) emit(v, g_cost);
    for (int ai : g.adj[v]) {
      const LinkGraph::Arc& arc = g.arcs[ai];
      if (arc.a == arc.b) continue;
      const int u = g.other_end(ai, v);
      if (on_path[u]) continue;
      rev_arcs.push_back(ai);
      dfs(u, g_cost + arc.w);
      rev_arcs.pop_back();
    }
    on_path[v] = 0;
    rev_nodes.pop_back();
  };

  if (b.is_node()) {
    dfs(b.node, 0.0);
  } else {
    for (auto [n, c] : seeds_b) {
      current_trail = c;
      dfs(n, c);
    }
  }
  return out;
}

std::optional<double> shortest_link_cycle(const LinkGraph& g, std::vector<int>* witness_arcs) {
  double best = k_inf;
  std::vector<int> best_arcs;
  for (int i = 0; i < static_cast<int>(g.arcs.size()); ++i) {
    const LinkGraph::Arc& a = g.arcs[i];
    if (a.a == a.b) {
      if (a.w < best) {
        best = a.w;
        best_arcs = {i};
      }
      continue;
    }
    const LinkSearch s = dijkstra(g, {{a.a, 0.0}}, k_inf, i);
    if (s.dist[a.b] == k_inf) continue;
    const double cand = a.w + s.dist[a.b];
    if (cand < best) {
      best = cand;
      best_arcs = {i};
      for (int n = a.b; s.parent_arc[n] >= 0; n = s.parent_node[n]) {
        best_arcs.push_back(s.parent_arc[n]);
      }
    }
  }
  if (best == k_inf) return std::nullopt;
  if (witness_arcs != nullptr) *witness_arcs = best_arcs;
  return best;
}

}  // namespace cat0
