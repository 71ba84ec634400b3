#include "mole2d/synth.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mole2d/angles.hpp"
#include "mole2d/errors.hpp"
#include "mole2d/rng.hpp"

namespace mole2d {

namespace {

// Zero-noise generators still need positive likelihood weights.
double variance_floor(double variance) { return variance > 0.0 ? variance : 1e-4; }

}  // namespace

GroundTruthInstance circle_graph(int steps, double noise_value_or_sigma,
                                 NoiseMode mode, std::uint64_t seed) {
  if (steps < 3) raise(Errc::OutOfRange, "circle needs at least 3 steps");

  Eigen::VectorXd theta(steps - 1);
  for (int i = 1; i < steps; ++i)
    theta[i - 1] = wrap(static_cast<double>(i) * kTwoPi / static_cast<double>(steps));

  std::vector<EdgeTopology> topo;
  topo.reserve(steps);
  for (int i = 0; i + 1 < steps; ++i) topo.push_back({i, i + 1});
  topo.push_back({steps - 1, 0});

  Eigen::VectorXd noise(steps), variances(steps);
  if (mode == NoiseMode::FixedValue) {
    noise.setConstant(noise_value_or_sigma);
    variances.setConstant(variance_floor(noise_value_or_sigma * noise_value_or_sigma));
  } else {
    const double sigma = noise_value_or_sigma;
    if (sigma < 0.0) raise(Errc::OutOfRange, "sigma must be >= 0");
    Rng rng(seed);
    for (int e = 0; e < steps; ++e) noise[e] = sigma > 0.0 ? rng.normal(sigma) : 0.0;
    variances.setConstant(variance_floor(sigma * sigma));
  }
  return make_ground_truth_instance(steps, topo, theta, noise, variances);
}

namespace {

struct Lawnmower {
  int rows = 0, cols = 0;
  std::vector<std::pair<int, int>> cell_of;  // pose -> (row, col)

  explicit Lawnmower(int rows_, int cols_) : rows(rows_), cols(cols_) {
    cell_of.reserve(static_cast<size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r) {
      if (r % 2 == 0)
        for (int c = 0; c < cols; ++c) cell_of.push_back({r, c});
      else
        for (int c = cols - 1; c >= 0; --c) cell_of.push_back({r, c});
    }
  }

  int poses() const { return static_cast<int>(cell_of.size()); }

  // Heading of the move leaving pose i (the last pose keeps its approach
  // heading). Moves are axis-aligned, so headings are multiples of pi/2.
  double heading(int i) const {
    const int a = std::min(i, poses() - 2);
    const auto [r0, c0] = cell_of[a];
    const auto [r1, c1] = cell_of[a + 1];
    if (c1 > c0) return 0.0;
    if (c1 < c0) return kPi;
    return kPi / 2.0;  // +row direction
  }

  // Loop-closure slots: grid-adjacent cell pairs not consecutive on the path.
  std::vector<EdgeTopology> chord_slots() const {
    std::vector<EdgeTopology> slots;
    std::vector<std::vector<int>> pose_at(rows, std::vector<int>(cols));
    for (int i = 0; i < poses(); ++i) pose_at[cell_of[i].first][cell_of[i].second] = i;
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        const int a = pose_at[r][c];
        if (c + 1 < cols) {
          const int b = pose_at[r][c + 1];
          if (std::abs(a - b) > 1) slots.push_back({std::max(a, b), std::min(a, b)});
        }
        if (r + 1 < rows) {
          const int b = pose_at[r + 1][c];
          if (std::abs(a - b) > 1) slots.push_back({std::max(a, b), std::min(a, b)});
        }
      }
    // later pose observes the earlier one; deterministic order by tail
    std::sort(slots.begin(), slots.end(), [](const EdgeTopology& x, const EdgeTopology& y) {
      return std::tie(x.tail, x.head) < std::tie(y.tail, y.head);
    });
    return slots;
  }
};

GroundTruthInstance build_grid_instance(const Lawnmower& walk,
                                        const std::vector<EdgeTopology>& chords,
                                        double sigma_theta, Rng& rng) {
  const int poses = walk.poses();
  Eigen::VectorXd theta(poses - 1);
  for (int i = 1; i < poses; ++i) theta[i - 1] = wrap(walk.heading(i));

  std::vector<EdgeTopology> topo;
  topo.reserve(poses - 1 + chords.size());
  for (int i = 0; i + 1 < poses; ++i) topo.push_back({i, i + 1});
  topo.insert(topo.end(), chords.begin(), chords.end());

  const int m = static_cast<int>(topo.size());
  Eigen::VectorXd noise(m), variances(m);
  variances.setConstant(variance_floor(sigma_theta * sigma_theta));
  for (int e = 0; e < m; ++e)
    noise[e] = sigma_theta > 0.0 ? rng.normal(sigma_theta) : 0.0;

  return make_ground_truth_instance(poses, topo, theta, noise, variances);
}

}  // namespace

GroundTruthInstance grid_walk(int rows, int cols, double chord_prob,
                              double sigma_theta, std::uint64_t seed) {
  if (rows < 1 || cols < 1 || rows * cols < 4)
    raise(Errc::OutOfRange, "grid needs at least 4 cells");
  if (chord_prob < 0.0 || chord_prob > 1.0)
    raise(Errc::OutOfRange, "chord probability must be in [0,1]");

  Rng rng(seed);
  const Lawnmower walk(rows, cols);
  std::vector<EdgeTopology> chords;
  for (const EdgeTopology& slot : walk.chord_slots())
    if (rng.uniform01() < chord_prob) chords.push_back(slot);
  return build_grid_instance(walk, chords, sigma_theta, rng);
}

GroundTruthInstance grid_walk_with_chords(int rows, int cols, int chord_count,
                                          double sigma_theta, std::uint64_t seed) {
  if (rows < 1 || cols < 1 || rows * cols < 4)
    raise(Errc::OutOfRange, "grid needs at least 4 cells");
  if (chord_count < 0) raise(Errc::OutOfRange, "chord count must be >= 0");

  Rng rng(seed);
  const Lawnmower walk(rows, cols);
  std::vector<EdgeTopology> slots = walk.chord_slots();
  // Fisher-Yates prefix selection, clamped to what the grid offers.
  const int take = std::min<int>(chord_count, static_cast<int>(slots.size()));
  for (int i = 0; i < take; ++i) {
    const int j = rng.uniform_int(i, static_cast<int>(slots.size()) - 1);
    std::swap(slots[i], slots[j]);
  }
  std::vector<EdgeTopology> chords(slots.begin(), slots.begin() + take);
  std::sort(chords.begin(), chords.end(), [](const EdgeTopology& x, const EdgeTopology& y) {
    return std::tie(x.tail, x.head) < std::tie(y.tail, y.head);
  });
  return build_grid_instance(walk, chords, sigma_theta, rng);
}

GroundTruthInstance inject_orientation_noise(const GroundTruthInstance& inst,
                                             double extra_sigma, std::uint64_t seed) {
  if (extra_sigma < 0.0) raise(Errc::OutOfRange, "extra sigma must be >= 0");
  if (extra_sigma == 0.0) return inst;

  Rng rng(seed);
  const PoseGraph& g = inst.graph;
  std::vector<EdgeTopology> topo(g.edges.size());
  for (int e = 0; e < g.m(); ++e) topo[e] = {g.edges[e].tail, g.edges[e].head};

  Eigen::VectorXd noise = inst.noise;
  Eigen::VectorXd variances = g.variances;
  for (int e = 0; e < g.m(); ++e) {
    noise[e] += rng.normal(extra_sigma);
    variances[e] += extra_sigma * extra_sigma;
  }
  return make_ground_truth_instance(g.node_count, topo, inst.theta_true, noise, variances);
}

}  // namespace mole2d
