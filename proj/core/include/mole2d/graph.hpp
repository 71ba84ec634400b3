#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <span>
#include <vector>

namespace mole2d {

/// Directed edge. The measurement attached to an edge follows the
/// head-minus-tail convention: delta ~ theta_head - theta_tail.
struct EdgeRecord {
  int id = 0;
  int tail = 0;
  int head = 0;
};

struct EdgeSpec {
  int tail = 0;
  int head = 0;
  double measurement = 0.0;  // radians
  double variance = 0.0;     // rad^2
};

/// Directed weighted pose graph carrying one relative-orientation
/// measurement per edge. Node 0 is the fixed reference; the n remaining
/// nodes are the observable variables. Immutable after construction.
struct PoseGraph {
  int node_count = 0;                  // n + 1
  std::vector<EdgeRecord> edges;       // ids are positions in [0, m)
  Eigen::VectorXd measurements;        // in (-pi, +pi], aligned with edges
  Eigen::VectorXd variances;           // > 0, aligned with edges
  std::vector<int> wrapped_on_ingest;  // edges whose measurement was re-wrapped

  int total_nodes() const { return node_count; }
  int n() const { return node_count - 1; }
  int m() const { return static_cast<int>(edges.size()); }
  int ell() const { return m() - n(); }  // cyclomatic number
};

/// Validates connectivity, self-loops and variances; wraps out-of-range
/// measurements into (-pi, +pi] and records which edges needed it.
PoseGraph build_graph(int node_count, std::span<const EdgeSpec> edges);

struct IncidencePair {
  Eigen::SparseMatrix<double> full;     // (n+1) x m
  Eigen::SparseMatrix<double> reduced;  // n x m, row of node 0 dropped
};

/// Column of edge e has -1 at the tail row and +1 at the head row.
IncidencePair incidence_matrices(const PoseGraph& g);

enum class TreeStrategy {
  Odometric,           // the trajectory path 0-1-...-n
  MinimumUncertainty,  // MST under w(i,j) = variance of the edge
};

struct SpanningTree {
  TreeStrategy strategy = TreeStrategy::MinimumUncertainty;
  std::vector<int> tree_edges;     // n edge ids, ascending
  std::vector<int> edge_ordering;  // permutation of [0, m): tree first, chords last
  std::vector<int> position_of;    // inverse of edge_ordering

  // Rooted-at-node-0 structure for tree-path walks.
  std::vector<int> parent_node;  // parent_node[0] = -1
  std::vector<int> parent_edge;  // edge id towards parent, -1 at root
  std::vector<int> depth;

  std::vector<int> chords() const {
    return {edge_ordering.begin() + static_cast<long>(tree_edges.size()),
            edge_ordering.end()};
  }
  bool is_tree_edge(int edge_id) const {
    return position_of[edge_id] < static_cast<int>(tree_edges.size());
  }
};

SpanningTree spanning_tree(const PoseGraph& g, TreeStrategy strategy);

}  // namespace mole2d
