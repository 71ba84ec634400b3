#include <Eigen/Dense>

#include "doctest.h"
#include "mole2d/angles.hpp"
#include "mole2d/errors.hpp"
#include "mole2d/graph.hpp"
#include "test_support.hpp"

using namespace mole2d;

TEST_CASE("minimal connected graph") {
  std::vector<EdgeSpec> edges = {{0, 1, 0.5, 0.01}};
  const PoseGraph g = build_graph(2, edges);
  CHECK(g.n() == 1);
  CHECK(g.m() == 1);
  CHECK(g.ell() == 0);
}

TEST_CASE("toy graph dimensions") {
  const PoseGraph g = testing::toy_graph();
  CHECK(g.n() == 7);
  CHECK(g.m() == 9);
  CHECK(g.ell() == 2);
}

TEST_CASE("validation errors") {
  std::vector<EdgeSpec> two_components = {{0, 1, 0.1, 0.01}, {2, 3, 0.1, 0.01}};
  CHECK_THROWS_WITH_AS(build_graph(4, two_components), doctest::Contains("Disconnected"),
                       Error);

  std::vector<EdgeSpec> self_loop = {{0, 0, 0.1, 0.01}, {0, 1, 0.1, 0.01}};
  CHECK_THROWS_WITH_AS(build_graph(2, self_loop), doctest::Contains("SelfLoop"), Error);

  std::vector<EdgeSpec> bad_var = {{0, 1, 0.1, 0.0}};
  CHECK_THROWS_WITH_AS(build_graph(2, bad_var), doctest::Contains("NonpositiveVariance"),
                       Error);
}

TEST_CASE("out-of-range measurements are wrapped and flagged") {
  std::vector<EdgeSpec> edges = {{0, 1, 5.0, 0.01}, {1, 0, 0.5, 0.01}};
  const PoseGraph g = build_graph(2, edges);
  CHECK(g.measurements[0] == doctest::Approx(5.0 - kTwoPi));
  CHECK(g.wrapped_on_ingest == std::vector<int>{0});
}

TEST_CASE("parallel edges are allowed") {
  std::vector<EdgeSpec> edges = {{0, 1, 0.1, 0.01}, {0, 1, 0.2, 0.02}};
  const PoseGraph g = build_graph(2, edges);
  CHECK(g.ell() == 1);
}

TEST_CASE("incidence matrices follow the column rule") {
  const PoseGraph g = testing::toy_graph();
  const IncidencePair inc = incidence_matrices(g);
  CHECK(Eigen::MatrixXd(inc.full) == testing::toy_full_incidence());
  CHECK(Eigen::MatrixXd(inc.reduced) == testing::toy_full_incidence().bottomRows(7));

  std::vector<EdgeSpec> single = {{0, 1, 0.3, 0.01}};
  const IncidencePair sp = incidence_matrices(build_graph(2, single));
  CHECK(Eigen::MatrixXd(sp.full) == (Eigen::MatrixXd(2, 1) << -1, 1).finished());
  CHECK(Eigen::MatrixXd(sp.reduced) == (Eigen::MatrixXd(1, 1) << 1).finished());

  // hand application of the rule on the path 0 -> 1 -> 2: node 1 is the tail
  // of the second edge, so its row carries -1 there
  std::vector<EdgeSpec> path = {{0, 1, 0.1, 0.01}, {1, 2, 0.1, 0.01}};
  const IncidencePair pp = incidence_matrices(build_graph(3, path));
  Eigen::MatrixXd expected(2, 2);
  expected << 1, -1, 0, 1;
  CHECK(Eigen::MatrixXd(pp.reduced) == expected);
}

TEST_CASE("reduced incidence has full row rank") {
  Rng rng(41);
  for (int trial = 0; trial < 25; ++trial) {
    const int nodes = rng.uniform_int(2, 14);
    const int chords = rng.uniform_int(0, 4);
    const PoseGraph g = testing::random_trajectory_graph(rng, nodes, chords);
    const Eigen::MatrixXd reduced = Eigen::MatrixXd(incidence_matrices(g).reduced);
    CHECK(Eigen::FullPivLU<Eigen::MatrixXd>(reduced).rank() == g.n());
    CHECK(g.ell() == g.m() - g.n());
  }
}

TEST_CASE("odometric spanning tree is the trajectory path") {
  const PoseGraph g = testing::toy_graph();
  const SpanningTree tree = spanning_tree(g, TreeStrategy::Odometric);
  CHECK(tree.tree_edges == std::vector<int>{0, 1, 2, 3, 4, 5, 7});
  CHECK(tree.chords() == std::vector<int>{6, 8});
  CHECK(tree.edge_ordering.size() == 9);
}

TEST_CASE("odometric tree requires the full path") {
  std::vector<EdgeSpec> edges = {{0, 1, 0.1, 0.01}, {0, 2, 0.1, 0.01}};
  const PoseGraph g = build_graph(3, edges);
  CHECK_THROWS_WITH_AS(spanning_tree(g, TreeStrategy::Odometric),
                       doctest::Contains("OdometricPathMissing"), Error);
}

TEST_CASE("tree graphs have no chords") {
  std::vector<EdgeSpec> edges = {{0, 1, 0.1, 0.01}, {1, 2, 0.1, 0.01}, {2, 3, 0.1, 0.01}};
  const PoseGraph g = build_graph(4, edges);
  for (auto strategy : {TreeStrategy::Odometric, TreeStrategy::MinimumUncertainty}) {
    const SpanningTree tree = spanning_tree(g, strategy);
    CHECK(tree.tree_edges == std::vector<int>{0, 1, 2});
    CHECK(tree.chords().empty());
  }
}

TEST_CASE("minimum-uncertainty tree keeps the lightest edges") {
  // all three spanning trees enumerated by hand: {0,1} wins with weight 0.3
  std::vector<EdgeSpec> edges = {{0, 1, 0.1, 0.1}, {1, 2, 0.1, 0.2}, {2, 0, 0.1, 0.3}};
  const PoseGraph g = build_graph(3, edges);
  const SpanningTree tree = spanning_tree(g, TreeStrategy::MinimumUncertainty);
  CHECK(tree.tree_edges == std::vector<int>{0, 1});
}

TEST_CASE("minimum spanning tree ties break on the smallest edge id") {
  std::vector<EdgeSpec> edges = {{0, 1, 0.1, 0.2}, {1, 2, 0.1, 0.2}, {2, 0, 0.1, 0.2}};
  const PoseGraph g = build_graph(3, edges);
  const SpanningTree tree = spanning_tree(g, TreeStrategy::MinimumUncertainty);
  CHECK(tree.tree_edges == std::vector<int>{0, 1});
}

TEST_CASE("minimum-uncertainty tree never beats the odometric tree") {
  Rng rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    const int nodes = rng.uniform_int(3, 16);
    const int chords = rng.uniform_int(1, 5);
    const PoseGraph g = testing::random_trajectory_graph(rng, nodes, chords);
    double odo = 0.0, mst = 0.0;
    for (int e : spanning_tree(g, TreeStrategy::Odometric).tree_edges) odo += g.variances[e];
    for (int e : spanning_tree(g, TreeStrategy::MinimumUncertainty).tree_edges)
      mst += g.variances[e];
    CHECK(mst <= odo + 1e-12);
  }
}
