#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "mole2d/cycles.hpp"
#include "mole2d/graph.hpp"

namespace mole2d {

/// Real-valued estimator of the integer cycle vector:
/// gamma_hat = C delta / (2 pi), covariance = C P_delta C^T / (4 pi^2).
struct GammaEstimate {
  Eigen::VectorXd gamma_hat;   // length ell
  Eigen::MatrixXd covariance;  // ell x ell, SPD

  int ell() const { return static_cast<int>(gamma_hat.size()); }
};

GammaEstimate gamma_estimator(const PoseGraph& g, const CycleBasisMatrix& basis);

struct ScreeningDiagnostics {
  int iterations = 0;                      // K; iterations that resolved something
  std::vector<int> resolved_per_iteration; // |U^(k)| for k = 1..K
  double alpha = 0.0;
  double eta = 0.0;  // alpha^(1/ell)
  BasisKind basis = BasisKind::Mcb;
  std::vector<int> empty_interval_coordinates;  // confidence-violated fallback fired
  bool cap_exceeded = false;
};

/// Per-coordinate integer candidate sets whose Cartesian product is Gamma.
struct HypothesisSet {
  std::vector<std::vector<long long>> per_coordinate;  // each ascending, nonempty
  ScreeningDiagnostics diagnostics;

  double log10_count() const;
  /// Exact product count when it fits in uint64; nullopt when it overflows.
  std::optional<std::uint64_t> count() const;
  bool exceeds(std::uint64_t cap) const;
};

inline constexpr std::uint64_t kDefaultHypothesisCap = 4096;

/// Iterative marginalize-and-condition screening (confidence alpha): each
/// ambiguous coordinate gets the closed interval zeta_i +- sqrt(P_ii *
/// chi2_{1,eta}) with eta = alpha^(1/ell); coordinates whose interval holds a
/// single integer are fixed and the belief is conditioned jointly on them.
/// Coordinates whose interval holds no integer fall back to the nearest
/// integer and are flagged in the diagnostics. P(gamma_true in Gamma) >= alpha
/// whenever no fallback fires. The cap is only recorded (diagnostics are
/// always returned); callers decide whether exceeding it is fatal.
HypothesisSet integer_screening(const GammaEstimate& estimate, double alpha,
                                std::uint64_t cap = kDefaultHypothesisCap);

/// One integer cycle vector with its orientation estimates. theta vectors
/// have length n; node 0 is fixed at zero and not stored.
struct OrientationHypothesis {
  std::vector<long long> gamma;
  Eigen::VectorXd theta_real;
  Eigen::VectorXd theta_wrapped;  // wrap(theta_real) elementwise
  double cost = 0.0;              // weighted squared wrapped residual at theta_wrapped
};

/// Cached factorization of A P^-1 A^T for repeated orientation recoveries on
/// one graph. Immutable once built; safe for concurrent solves.
class OrientationSolver {
 public:
  explicit OrientationSolver(const PoseGraph& g);
  ~OrientationSolver();
  OrientationSolver(OrientationSolver&&) noexcept;
  OrientationSolver& operator=(OrientationSolver&&) noexcept;

  /// theta = (A P^-1 A^T)^-1 A P^-1 (delta - 2 pi k).
  Eigen::VectorXd solve_given_k(std::span<const long long> k) const;
  /// theta = (A P^-1 A^T)^-1 A P^-1 rhs for an arbitrary edge-space rhs.
  Eigen::VectorXd solve_edge_rhs(const Eigen::VectorXd& rhs) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Eigen::VectorXd theta_given_k(const PoseGraph& g, std::span<const long long> k);

OrientationHypothesis theta_given_gamma(const PoseGraph& g,
                                        const CycleBasisMatrix& basis,
                                        std::span<const long long> gamma);

/// Sum over edges of |wrap(theta_head - theta_tail - delta)|^2 / variance,
/// with node 0 fixed at zero. Invariant under adding multiples of 2 pi to any
/// entry of theta.
double cost(const PoseGraph& g, const Eigen::VectorXd& theta);

struct Mole2dOptions {
  double alpha = 0.99;
  BasisKind basis = BasisKind::Mcb;
  std::uint64_t max_hypotheses = kDefaultHypothesisCap;
  int workers = 1;
};

struct Mole2dResult {
  CycleBasisMatrix basis;
  GammaEstimate estimate;
  HypothesisSet screening;
  std::vector<OrientationHypothesis> hypotheses;  // ascending cost, ties by lexicographic gamma
};

/// Full pipeline: cycle basis, gamma estimator, integer screening, one
/// orientation hypothesis per admissible gamma. Requires a connected graph
/// with edges pre-split so that 3*sigma stays below the wrap boundary.
/// Throws CapExceeded when |Gamma| would exceed max_hypotheses.
Mole2dResult mole2d(const PoseGraph& g, const Mole2dOptions& options = {});

struct MlSearchResult {
  std::vector<long long> gamma;
  double objective = 0.0;            // ||gamma - gamma_hat||^2 in the P^-1 metric
  double runner_up_objective = 0.0;  // +inf when the box has a single point
  bool tie = false;                  // runner-up within 1e-12 of the optimum
};

inline constexpr std::uint64_t kDefaultMlBudget = std::uint64_t(1) << 22;

/// Exhaustive minimization of the integer quadratic objective over the box of
/// integers within gamma_hat +- radius (componentwise). Desk-scale substitute
/// for the NP-hard program; throws BudgetExceeded when the box is too large.
MlSearchResult ml_search(const GammaEstimate& estimate, int radius,
                         std::uint64_t budget = kDefaultMlBudget);

OrientationHypothesis ml_estimate(const PoseGraph& g, const CycleBasisMatrix& basis,
                                  const GammaEstimate& estimate, int radius,
                                  std::uint64_t budget = kDefaultMlBudget);

}  // namespace mole2d
