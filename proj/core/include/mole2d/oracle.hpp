#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mole2d/cycles.hpp"
#include "mole2d/graph.hpp"

namespace mole2d {

/// Simulation-only instance with known ground truth. By construction the
/// stored measurements satisfy delta = wrap(A^T theta_true + noise)
/// elementwise, bit for bit.
struct GroundTruthInstance {
  PoseGraph graph;
  Eigen::VectorXd theta_true;  // wrapped, length n (node 0 fixed at zero)
  Eigen::VectorXd noise;       // real-valued, length m
};

struct EdgeTopology {
  int tail = 0;
  int head = 0;
};

/// Assembles the instance and derives the measurements from truth + noise.
GroundTruthInstance make_ground_truth_instance(int node_count,
                                               std::span<const EdgeTopology> edges,
                                               const Eigen::VectorXd& theta_true,
                                               const Eigen::VectorXd& noise,
                                               const Eigen::VectorXd& variances);

/// Per-edge true regularizers: the integer k making
/// delta = A^T theta_true + noise + 2 pi k land in (-pi, +pi].
std::vector<long long> true_regularizers(const GroundTruthInstance& inst);

/// gamma_true = C k_true for the given basis.
std::vector<long long> true_gamma(const GroundTruthInstance& inst,
                                  const CycleBasisMatrix& basis);

struct GridSearchResult {
  Eigen::VectorXd theta;  // wrapped, length n
  double cost = 0.0;
  bool full_grid = false;  // dense enumeration (vs multi-start descent)
};

enum class GridSearchMode { Auto, FullGrid, MultiStart };

inline constexpr double kDefaultGridResolution = 2.0 * 3.141592653589793238462643 / 720.0;

/// Global-minimum reference for the wrapped least-squares objective. Dense
/// enumeration of (-pi, +pi]^n at the given resolution when affordable,
/// otherwise coordinate descent (golden-section per coordinate, polished
/// until the improvement drops below 1e-9) from 100 seeded random starts.
/// Implemented independently of the estimator path it cross-checks.
GridSearchResult grid_search_angles(const PoseGraph& g,
                                    double resolution = kDefaultGridResolution,
                                    GridSearchMode mode = GridSearchMode::Auto,
                                    std::uint64_t budget = std::uint64_t(50'000'000),
                                    std::uint64_t seed = 1234);

/// Trial-instance family for Monte Carlo suites: lawnmower grid walks with a
/// fixed number of loop-closure chords, uniformly random true orientations
/// and per-instance noise level.
struct CoverageConfig {
  int min_rows = 3, max_rows = 5;
  int min_cols = 3, max_cols = 6;
  int min_chords = 2, max_chords = 6;
  double min_sigma = 0.05, max_sigma = 0.3;
  BasisKind basis = BasisKind::Mcb;
  bool zero_noise = false;
  int workers = 1;
};

struct CoverageResult {
  int trials = 0;
  int hits = 0;
  double fraction = 0.0;
  double binomial_stderr = 0.0;  // sqrt(alpha (1-alpha) / trials)
};

/// Empirical frequency of gamma_true landing in the screening set Gamma.
/// Deterministic given (config, alpha, trials, seed); trials run on derived
/// per-trial seeds so results do not depend on worker count.
CoverageResult monte_carlo_coverage(const CoverageConfig& config, double alpha,
                                    int trials, std::uint64_t seed);

struct WraparoundCheck {
  double empirical = 0.0;
  double analytic = 0.0;  // 1 - erf(pi / (sigma_cycle sqrt(2)))
  int trials = 0;
};

/// Probability that accumulated cycle noise exceeds pi in absolute value.
WraparoundCheck wraparound_probability_check(double sigma_cycle, int trials,
                                             std::uint64_t seed);

}  // namespace mole2d
