#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <memory>
#include <span>
#include <vector>

namespace mole2d {

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse standard normal CDF: rational approximation refined by one Halley
/// step against erf, absolute error well below 1e-9 on (0, 1).
double normal_quantile(double p);

/// Lower-tail quantile of chi-square with 1 degree of freedom,
/// (Phi^-1((1+eta)/2))^2. Throws OutOfRange unless eta in (0, 1).
double chi2_quantile_1dof(double eta);

/// Lower-tail CDF of chi-square with 1 degree of freedom.
double chi2_cdf_1dof(double x);

struct GaussianBelief {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;

  int dim() const { return static_cast<int>(mean.size()); }
};

/// Gaussian conditioning on { x[fixed_indices[j]] = fixed_values[j] } via the
/// Schur complement; returns the belief over the remaining indices in their
/// original relative order. Throws SingularBlock when the fixed sub-covariance
/// is not invertible.
GaussianBelief condition(const GaussianBelief& belief,
                         std::span<const int> fixed_indices,
                         std::span<const double> fixed_values);

/// Factorization of A P^-1 A^T for A the reduced incidence matrix of a
/// connected graph and P diagonal positive: sparse Cholesky (fill-reducing
/// ordering) with one step of iterative refinement, dense below dimension 50.
/// Immutable once built; solves may run concurrently.
class WeightedLsSolver {
 public:
  WeightedLsSolver(const Eigen::SparseMatrix<double>& reduced_incidence,
                   const Eigen::VectorXd& variances);
  ~WeightedLsSolver();
  WeightedLsSolver(WeightedLsSolver&&) noexcept;
  WeightedLsSolver& operator=(WeightedLsSolver&&) noexcept;

  /// x with (A P^-1 A^T) x = A P^-1 rhs, rhs living on the edges.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrapper around WeightedLsSolver.
Eigen::VectorXd weighted_ls_solve(const Eigen::SparseMatrix<double>& reduced_incidence,
                                  const Eigen::VectorXd& variances,
                                  const Eigen::VectorXd& rhs);

/// Max-norm of P^-1 A^T (A P^-1 A^T)^-1 A P^-1 + C^T (C P C^T)^-1 C - P^-1
/// evaluated densely. Intended for verification at small scale (m <= ~200).
double projection_identity_residual(const Eigen::MatrixXd& reduced_incidence,
                                    const Eigen::MatrixXd& cycle_basis,
                                    const Eigen::VectorXd& variances);

}  // namespace mole2d
