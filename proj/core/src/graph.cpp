#include "mole2d/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

#include "mole2d/angles.hpp"
#include "mole2d/errors.hpp"

namespace mole2d {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

// Rooted orientation of the tree: parent pointers from node 0 outward.
void root_tree(const PoseGraph& g, SpanningTree& tree) {
  const int nodes = g.node_count;
  std::vector<std::vector<std::pair<int, int>>> adj(nodes);  // (neighbor, edge id)
  for (int e : tree.tree_edges) {
    adj[g.edges[e].tail].push_back({g.edges[e].head, e});
    adj[g.edges[e].head].push_back({g.edges[e].tail, e});
  }
  tree.parent_node.assign(nodes, -1);
  tree.parent_edge.assign(nodes, -1);
  tree.depth.assign(nodes, -1);
  std::queue<int> frontier;
  frontier.push(0);
  tree.depth[0] = 0;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (auto [v, e] : adj[u]) {
      if (tree.depth[v] >= 0 || v == 0) continue;
      tree.depth[v] = tree.depth[u] + 1;
      tree.parent_node[v] = u;
      tree.parent_edge[v] = e;
      frontier.push(v);
    }
  }
}

void finalize_ordering(const PoseGraph& g, SpanningTree& tree) {
  std::sort(tree.tree_edges.begin(), tree.tree_edges.end());
  std::vector<bool> in_tree(g.m(), false);
  for (int e : tree.tree_edges) in_tree[e] = true;
  tree.edge_ordering = tree.tree_edges;
  tree.edge_ordering.reserve(g.m());
  for (int e = 0; e < g.m(); ++e)
    if (!in_tree[e]) tree.edge_ordering.push_back(e);
  tree.position_of.assign(g.m(), -1);
  for (int pos = 0; pos < g.m(); ++pos) tree.position_of[tree.edge_ordering[pos]] = pos;
  root_tree(g, tree);
}

}  // namespace

PoseGraph build_graph(int node_count, std::span<const EdgeSpec> edges) {
  if (node_count < 2) raise(Errc::OutOfRange, "need at least 2 nodes");

  PoseGraph g;
  g.node_count = node_count;
  g.edges.reserve(edges.size());
  g.measurements.resize(static_cast<long>(edges.size()));
  g.variances.resize(static_cast<long>(edges.size()));

  UnionFind uf(node_count);
  int components = node_count;
  int id = 0;
  for (const EdgeSpec& spec : edges) {
    if (spec.tail < 0 || spec.tail >= node_count || spec.head < 0 || spec.head >= node_count)
      raise(Errc::OutOfRange, "edge endpoint outside [0, node_count)");
    if (spec.tail == spec.head)
      raise(Errc::SelfLoop, "edge " + std::to_string(id) + " is a self-loop");
    if (!std::isfinite(spec.measurement))
      raise(Errc::NonFinite, "measurement of edge " + std::to_string(id));
    if (!(spec.variance > 0.0) || !std::isfinite(spec.variance))
      raise(Errc::NonpositiveVariance, "variance of edge " + std::to_string(id));

    const double wrapped = wrap(spec.measurement);
    if (wrapped != spec.measurement) g.wrapped_on_ingest.push_back(id);
    g.edges.push_back({id, spec.tail, spec.head});
    g.measurements[id] = wrapped;
    g.variances[id] = spec.variance;
    if (uf.unite(spec.tail, spec.head)) --components;
    ++id;
  }
  if (components != 1)
    raise(Errc::Disconnected, "graph has " + std::to_string(components) + " components");
  return g;
}

IncidencePair incidence_matrices(const PoseGraph& g) {
  IncidencePair out;
  std::vector<Eigen::Triplet<double>> full, reduced;
  full.reserve(2 * g.m());
  reduced.reserve(2 * g.m());
  for (const EdgeRecord& e : g.edges) {
    full.emplace_back(e.tail, e.id, -1.0);
    full.emplace_back(e.head, e.id, +1.0);
    if (e.tail != 0) reduced.emplace_back(e.tail - 1, e.id, -1.0);
    if (e.head != 0) reduced.emplace_back(e.head - 1, e.id, +1.0);
  }
  out.full.resize(g.node_count, g.m());
  out.full.setFromTriplets(full.begin(), full.end());
  out.reduced.resize(g.n(), g.m());
  out.reduced.setFromTriplets(reduced.begin(), reduced.end());
  return out;
}

SpanningTree spanning_tree(const PoseGraph& g, TreeStrategy strategy) {
  SpanningTree tree;
  tree.strategy = strategy;
  tree.tree_edges.reserve(g.n());

  if (strategy == TreeStrategy::Odometric) {
    // The trajectory path: one edge joining i and i+1 for every i, smallest
    // id when several exist.
    std::vector<int> chosen(g.node_count - 1, -1);
    for (const EdgeRecord& e : g.edges) {
      const int lo = std::min(e.tail, e.head);
      const int hi = std::max(e.tail, e.head);
      if (hi - lo != 1) continue;
      if (chosen[lo] < 0) chosen[lo] = e.id;
    }
    for (int i = 0; i + 1 < g.node_count; ++i) {
      if (chosen[i] < 0)
        raise(Errc::OdometricPathMissing,
              "no edge between consecutive nodes " + std::to_string(i) + " and " +
                  std::to_string(i + 1));
      tree.tree_edges.push_back(chosen[i]);
    }
  } else {
    // Kruskal under w = variance, ties by smallest edge id (the edge vector
    // is scanned in id order, so a stable sort on weight suffices).
    std::vector<int> order(g.m());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return g.variances[a] < g.variances[b]; });
    UnionFind uf(g.node_count);
    for (int e : order) {
      if (uf.unite(g.edges[e].tail, g.edges[e].head)) {
        tree.tree_edges.push_back(e);
        if (static_cast<int>(tree.tree_edges.size()) == g.n()) break;
      }
    }
  }

  finalize_ordering(g, tree);
  return tree;
}

}  // namespace mole2d
