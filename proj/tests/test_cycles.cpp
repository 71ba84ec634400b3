#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "mole2d/angles.hpp"
#include "mole2d/cycles.hpp"
#include "mole2d/errors.hpp"
#include "test_support.hpp"

using namespace mole2d;

namespace {

std::set<int> support(const Circuit& row) {
  std::set<int> out;
  for (const CircuitEntry& e : row) out.insert(e.edge);
  return out;
}

// C A^T in exact integer arithmetic.
bool orthogonal_to_incidence(const PoseGraph& g, const CycleBasisMatrix& basis) {
  for (const Circuit& row : basis.rows) {
    std::vector<long long> per_node(g.node_count, 0);
    for (const CircuitEntry& entry : row) {
      per_node[g.edges[entry.edge].tail] -= entry.sign;
      per_node[g.edges[entry.edge].head] += entry.sign;
    }
    for (long long v : per_node)
      if (v != 0) return false;
  }
  return true;
}

bool rows_are_circuits(const PoseGraph& g, const CycleBasisMatrix& basis) {
  for (const Circuit& row : basis.rows) {
    std::map<int, int> degree;
    for (const CircuitEntry& entry : row) {
      ++degree[g.edges[entry.edge].tail];
      ++degree[g.edges[entry.edge].head];
    }
    for (auto [node, d] : degree)
      if (d != 2) return false;
  }
  return true;
}

// Exhaustive reference: every edge subset that forms a single circuit.
struct ReferenceCycle {
  std::uint32_t mask;
  double weight;
};

std::vector<ReferenceCycle> all_circuits(const PoseGraph& g) {
  std::vector<ReferenceCycle> cycles;
  for (std::uint32_t mask = 1; mask < (1u << g.m()); ++mask) {
    std::map<int, int> degree;
    double weight = 0.0;
    for (int e = 0; e < g.m(); ++e) {
      if (!(mask & (1u << e))) continue;
      ++degree[g.edges[e].tail];
      ++degree[g.edges[e].head];
      weight += g.variances[e];
    }
    bool circuit = !degree.empty();
    for (auto [node, d] : degree)
      if (d != 2) circuit = false;
    if (!circuit) continue;
    // connectivity of the support
    std::map<int, std::vector<int>> adj;
    for (int e = 0; e < g.m(); ++e) {
      if (!(mask & (1u << e))) continue;
      adj[g.edges[e].tail].push_back(g.edges[e].head);
      adj[g.edges[e].head].push_back(g.edges[e].tail);
    }
    std::set<int> seen;
    std::vector<int> stack = {degree.begin()->first};
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      if (!seen.insert(u).second) continue;
      for (int v : adj[u]) stack.push_back(v);
    }
    if (seen.size() == degree.size()) cycles.push_back({mask, weight});
  }
  return cycles;
}

int gf2_rank(std::vector<std::uint32_t> rows) {
  int rank = 0;
  for (int bit = 0; bit < 32; ++bit) {
    int pivot = -1;
    for (size_t r = rank; r < rows.size(); ++r)
      if (rows[r] & (1u << bit)) {
        pivot = static_cast<int>(r);
        break;
      }
    if (pivot < 0) continue;
    std::swap(rows[rank], rows[pivot]);
    for (size_t r = 0; r < rows.size(); ++r)
      if (static_cast<int>(r) != rank && (rows[r] & (1u << bit))) rows[r] ^= rows[rank];
    ++rank;
  }
  return rank;
}

// Minimum total weight over all GF(2)-independent triples of circuits.
double exhaustive_mcb_weight_ell3(const PoseGraph& g) {
  const std::vector<ReferenceCycle> cycles = all_circuits(g);
  double best = 1e300;
  for (size_t a = 0; a < cycles.size(); ++a)
    for (size_t b = a + 1; b < cycles.size(); ++b)
      for (size_t c = b + 1; c < cycles.size(); ++c) {
        if (gf2_rank({cycles[a].mask, cycles[b].mask, cycles[c].mask}) != 3) continue;
        best = std::min(best, cycles[a].weight + cycles[b].weight + cycles[c].weight);
      }
  return best;
}

}  // namespace

TEST_CASE("fundamental basis of the toy graph matches the printed rows") {
  const PoseGraph g = testing::toy_graph();
  const CycleBasisMatrix basis =
      fundamental_cycle_basis(g, spanning_tree(g, TreeStrategy::Odometric));
  REQUIRE(basis.ell() == 2);

  // row for chord 6 covers {2,3,4,5,6}; row for chord 8 covers everything else
  CHECK(support(basis.rows[0]) == std::set<int>{2, 3, 4, 5, 6});
  CHECK(support(basis.rows[1]) == std::set<int>{0, 1, 2, 3, 4, 5, 7, 8});
  for (const Circuit& row : basis.rows)
    for (const CircuitEntry& entry : row) CHECK(entry.sign == +1);
}

TEST_CASE("single cycle graph has the all-ones fundamental row") {
  std::vector<EdgeSpec> edges;
  const int steps = 6;
  for (int i = 0; i + 1 < steps; ++i) edges.push_back({i, i + 1, 0.1, 0.01});
  edges.push_back({steps - 1, 0, 0.1, 0.01});
  const PoseGraph g = build_graph(steps, edges);
  const CycleBasisMatrix basis =
      fundamental_cycle_basis(g, spanning_tree(g, TreeStrategy::Odometric));
  REQUIRE(basis.ell() == 1);
  CHECK(basis.rows[0].size() == static_cast<size_t>(steps));
  for (const CircuitEntry& entry : basis.rows[0]) CHECK(entry.sign == +1);

  // only one cycle exists, so the minimum basis is the same circuit
  const CycleBasisMatrix mcb = minimum_cycle_basis(g);
  REQUIRE(mcb.ell() == 1);
  CHECK(support(mcb.rows[0]) == support(basis.rows[0]));
}

TEST_CASE("every produced basis is orthogonal to the incidence matrix") {
  Rng rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const PoseGraph g = testing::random_trajectory_graph(rng, rng.uniform_int(3, 12),
                                                         rng.uniform_int(0, 4));
    for (const CycleBasisMatrix& basis :
         {fundamental_cycle_basis(g, spanning_tree(g, TreeStrategy::Odometric)),
          fundamental_cycle_basis(g, spanning_tree(g, TreeStrategy::MinimumUncertainty)),
          minimum_cycle_basis(g)}) {
      CHECK(orthogonal_to_incidence(g, basis));
      CHECK(rows_are_circuits(g, basis));
      CHECK(basis.ell() == g.ell());
      if (basis.ell() > 0) {
        const Eigen::MatrixXd dense = basis.to_dense();
        CHECK(Eigen::FullPivLU<Eigen::MatrixXd>(dense).rank() == g.ell());
      }
    }
  }
}

TEST_CASE("cycle weights") {
  const PoseGraph g = testing::toy_graph();  // unit weights
  const CycleBasisMatrix fcb =
      fundamental_cycle_basis(g, spanning_tree(g, TreeStrategy::Odometric));
  CHECK(cycle_weight(fcb.rows[1], g.variances) == doctest::Approx(8.0));
  CHECK(basis_weight(fcb, g.variances) == doctest::Approx(13.0));
  CHECK(cycle_weight({}, g.variances) == 0.0);

  Eigen::VectorXd v(9);
  v.setConstant(0.04);
  CHECK(cycle_weight(fcb.rows[0], v) == doctest::Approx(0.20));
}

TEST_CASE("minimum cycle basis of the toy graph") {
  const PoseGraph g = testing::toy_graph();
  const CycleBasisMatrix mcb = minimum_cycle_basis(g);
  REQUIRE(mcb.ell() == 2);
  CHECK(basis_weight(mcb, g.variances) == doctest::Approx(10.0));
  std::set<std::set<int>> supports = {support(mcb.rows[0]), support(mcb.rows[1])};
  CHECK(supports == std::set<std::set<int>>{{2, 3, 4, 5, 6}, {0, 1, 6, 7, 8}});
}

TEST_CASE("minimum basis weight matches exhaustive search") {
  Rng rng(59);
  int done = 0;
  while (done < 12) {
    const PoseGraph g = testing::random_trajectory_graph(rng, 6, 3, 0.05, 1.0);
    if (g.ell() != 3) continue;
    ++done;
    const double expected = exhaustive_mcb_weight_ell3(g);
    CHECK(basis_weight(minimum_cycle_basis(g), g.variances) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("minimum basis never weighs more than a fundamental one") {
  Rng rng(61);
  for (int trial = 0; trial < 15; ++trial) {
    const PoseGraph g = testing::random_trajectory_graph(rng, rng.uniform_int(4, 14),
                                                         rng.uniform_int(1, 5));
    const double mcb = basis_weight(minimum_cycle_basis(g), g.variances);
    for (auto strategy : {TreeStrategy::Odometric, TreeStrategy::MinimumUncertainty}) {
      const double fcb =
          basis_weight(fundamental_cycle_basis(g, spanning_tree(g, strategy)), g.variances);
      CHECK(mcb <= fcb + 1e-12);
    }
  }
}

TEST_CASE("pseudoinverse on a fundamental basis places gamma on the chords") {
  const PoseGraph g = testing::toy_graph();
  const CycleBasisMatrix fcb =
      fundamental_cycle_basis(g, spanning_tree(g, TreeStrategy::Odometric));
  const std::vector<long long> gamma = {2, -1};
  const std::vector<long long> k = apply_pseudoinverse(fcb, gamma);
  CHECK(k == std::vector<long long>{0, 0, 0, 0, 0, 0, 2, 0, -1});

  const std::vector<long long> zero = {0, 0};
  CHECK(apply_pseudoinverse(fcb, zero) == std::vector<long long>(9, 0));
}

TEST_CASE("pseudoinverse solves the minimum basis exactly") {
  const PoseGraph g = testing::toy_graph();
  const CycleBasisMatrix mcb = minimum_cycle_basis(g);
  const std::vector<long long> gamma = {1, 0};
  const std::vector<long long> k = apply_pseudoinverse(mcb, gamma);
  CHECK(mcb.apply_int(k) == gamma);
}

TEST_CASE("pseudoinverse round-trips random integer vectors") {
  Rng rng(67);
  for (int trial = 0; trial < 8; ++trial) {
    const PoseGraph g = testing::random_trajectory_graph(rng, rng.uniform_int(4, 12),
                                                         rng.uniform_int(1, 5));
    for (const CycleBasisMatrix& basis :
         {fundamental_cycle_basis(g, spanning_tree(g, TreeStrategy::MinimumUncertainty)),
          minimum_cycle_basis(g)}) {
      const PseudoinverseApplier applier(basis);
      for (int rep = 0; rep < 100; ++rep) {
        std::vector<long long> gamma(basis.ell());
        for (auto& v : gamma) v = rng.uniform_int(-6, 6);
        CHECK(basis.apply_int(applier.apply(gamma)) == gamma);
      }
    }
  }
}
