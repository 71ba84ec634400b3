#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "mole2d/graph.hpp"

namespace mole2d {

/// One signed circuit entry: +1 when the circuit traverses the edge from
/// tail to head, -1 otherwise.
struct CircuitEntry {
  int edge = 0;
  int sign = 0;
};

/// A circuit as a sparse row of the cycle basis matrix, sorted by edge id.
/// Every node touched by the support has degree exactly 2.
using Circuit = std::vector<CircuitEntry>;

enum class BasisKind { FcbOdo, FcbMst, Mcb };

const char* basis_kind_name(BasisKind kind);

/// ell x m integer circuit matrix, canonical against a spanning tree: under
/// `ordering` the first n columns are tree edges, the trailing ell x ell
/// block C_L is integer-invertible with determinant +-1, and C A^T = 0 holds
/// exactly in integer arithmetic.
struct CycleBasisMatrix {
  BasisKind kind = BasisKind::FcbMst;
  int edge_count = 0;  // m
  std::vector<Circuit> rows;
  SpanningTree ordering;

  int ell() const { return static_cast<int>(rows.size()); }
  Eigen::MatrixXd to_dense() const;

  /// C * x for an integer edge vector; exact.
  std::vector<long long> apply_int(std::span<const long long> edge_vector) const;
  /// C * x for a real edge vector.
  Eigen::VectorXd apply(const Eigen::VectorXd& edge_vector) const;
};

/// One row per chord: +1 on the chord, +-1 along the unique tree path from
/// the chord head back to the chord tail. Under the canonical ordering the
/// C_L block is the identity.
CycleBasisMatrix fundamental_cycle_basis(const PoseGraph& g, const SpanningTree& tree);

/// Exact minimum cycle basis under w(i,j) = variance, via Horton's candidate
/// family (shortest-path-tree cycles) filtered to ell independent circuits
/// over GF(2) in ascending weight, then canonicalized against the
/// minimum-uncertainty spanning tree.
CycleBasisMatrix minimum_cycle_basis(const PoseGraph& g);

/// Sum of variance weights over the circuit's support.
double cycle_weight(const Circuit& circuit, const Eigen::VectorXd& variances);
double basis_weight(const CycleBasisMatrix& basis, const Eigen::VectorXd& variances);

/// Exact integer right pseudoinverse: solves C k = gamma with
/// k = (0_n ; C_L^-1 gamma) in the canonical ordering. C_L^-1 is computed
/// once by fraction-free (Bareiss) elimination and every apply() verifies
/// C k == gamma exactly. Throws CanonicalizationFailure when C_L is singular
/// or the exact arithmetic would overflow.
class PseudoinverseApplier {
 public:
  explicit PseudoinverseApplier(const CycleBasisMatrix& basis);

  std::vector<long long> apply(std::span<const long long> gamma) const;

 private:
  const CycleBasisMatrix* basis_;
  std::vector<int> chord_edges_;  // edge id per canonical chord position
  bool identity_block_ = false;
  std::vector<std::vector<long long>> inverse_;  // C_L^-1 when not identity
};

std::vector<long long> apply_pseudoinverse(const CycleBasisMatrix& basis,
                                           std::span<const long long> gamma);

}  // namespace mole2d
