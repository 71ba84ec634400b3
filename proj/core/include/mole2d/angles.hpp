#pragma once

#include "mole2d/graph.hpp"
#include "mole2d/rng.hpp"

namespace mole2d {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Principal value in the half-open interval (-pi, +pi]:
/// wrap(w) = w + 2*pi*floor((pi - w) / (2*pi)). Rounding at the boundary is
/// resolved towards +pi, so wrap(-pi) == wrap(pi) == pi.
double wrap(double omega);

/// The integer k with wrap(w) == w + 2*pi*k; equivalently the minimizer of
/// |w + 2*pi*k| over the integers.
long long regularizer(double omega);

/// Zero-mean wrapped Gaussian on the circle.
class WrappedGaussian {
 public:
  explicit WrappedGaussian(double variance);

  double variance() const { return variance_; }

  /// Density at x in (-pi, +pi]. The alias series is truncated once the
  /// neglected tail is below 1e-12.
  double pdf(double x) const;

  /// wrap(z) with z ~ N(0, variance).
  double sample(Rng& rng) const;

 private:
  double variance_;
  int series_terms_;
};

double wrapped_pdf(double x, double variance);
double sample_wrapped(double variance, Rng& rng);

inline constexpr double kDefaultSplitThreshold = kPi / 2.0;  // bound on 3*sigma

/// Replaces every edge whose 3*sigma exceeds the threshold by q serial
/// sub-edges through q-1 auxiliary nodes (variance sigma^2/q, measurement
/// delta/q re-wrapped), q minimal with 3*sigma/sqrt(q) <= threshold. The
/// composed likelihood is unchanged and the cycle-space dimension is
/// preserved. Auxiliary nodes are appended after the original ones.
PoseGraph split_large_variance_edges(const PoseGraph& g,
                                     double threshold = kDefaultSplitThreshold);

}  // namespace mole2d
