#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mole2d/graph.hpp"
#include "mole2d/rng.hpp"

namespace mole2d::testing {

// The 8-node / 9-edge toy graph: a spanning path A-B-C-D-E-F-G-H (edges 0..5
// and 7), a chord G->C (edge 6) and a closing chord H->A (edge 8).
inline PoseGraph toy_graph(double variance = 1.0) {
  std::vector<EdgeSpec> edges = {
      {0, 1, 0.0, variance}, {1, 2, 0.0, variance}, {2, 3, 0.0, variance},
      {3, 4, 0.0, variance}, {4, 5, 0.0, variance}, {5, 6, 0.0, variance},
      {6, 2, 0.0, variance}, {6, 7, 0.0, variance}, {7, 0, 0.0, variance},
  };
  return build_graph(8, edges);
}

inline Eigen::MatrixXd toy_full_incidence() {
  Eigen::MatrixXd a(8, 9);
  a << -1, 0, 0, 0, 0, 0, 0, 0, +1,  //
      +1, -1, 0, 0, 0, 0, 0, 0, 0,   //
      0, +1, -1, 0, 0, 0, +1, 0, 0,  //
      0, 0, +1, -1, 0, 0, 0, 0, 0,   //
      0, 0, 0, +1, -1, 0, 0, 0, 0,   //
      0, 0, 0, 0, +1, -1, 0, 0, 0,   //
      0, 0, 0, 0, 0, +1, -1, -1, 0,  //
      0, 0, 0, 0, 0, 0, 0, +1, -1;
  return a;
}

// Trajectory-style random instance: path 0..(nodes-1) plus `chords` extra
// edges between distinct non-consecutive nodes. Variances uniform in
// [var_lo, var_hi]; measurements uniform angles.
inline PoseGraph random_trajectory_graph(Rng& rng, int nodes, int chords,
                                         double var_lo = 0.02, double var_hi = 0.5) {
  std::vector<EdgeSpec> edges;
  for (int i = 0; i + 1 < nodes; ++i)
    edges.push_back({i, i + 1, rng.uniform(-3.14, 3.14), rng.uniform(var_lo, var_hi)});
  int added = 0;
  while (added < chords) {
    const int a = rng.uniform_int(0, nodes - 1);
    const int b = rng.uniform_int(0, nodes - 1);
    if (a == b || std::abs(a - b) == 1) continue;
    edges.push_back({a, b, rng.uniform(-3.14, 3.14), rng.uniform(var_lo, var_hi)});
    ++added;
  }
  return build_graph(nodes, edges);
}

}  // namespace mole2d::testing
