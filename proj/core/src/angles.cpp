#include "mole2d/angles.hpp"

#include <cmath>
#include <limits>

#include "mole2d/errors.hpp"

namespace mole2d {

namespace {

// Shared guarded reduction: floor form first, then at most one 2*pi nudge to
// absorb rounding at the interval boundary (resolved towards +pi).
long long wrap_k(double omega) {
  long long k = static_cast<long long>(std::floor((kPi - omega) / kTwoPi));
  double r = omega + kTwoPi * static_cast<double>(k);
  if (r > kPi) {
    k -= 1;
  } else if (r <= -kPi) {
    k += 1;
  }
  return k;
}

}  // namespace

double wrap(double omega) {
  if (!std::isfinite(omega)) raise(Errc::NonFinite, "wrap() of non-finite angle");
  const long long k = wrap_k(omega);
  double r = omega + kTwoPi * static_cast<double>(k);
  // fused rounding can still leave r an ulp outside the half-open interval
  if (r > kPi) r = kPi;
  if (r <= -kPi) r = kPi;
  return r;
}

long long regularizer(double omega) {
  if (!std::isfinite(omega)) raise(Errc::NonFinite, "regularizer() of non-finite angle");
  return wrap_k(omega);
}

WrappedGaussian::WrappedGaussian(double variance) : variance_(variance) {
  if (!(variance > 0.0) || !std::isfinite(variance))
    raise(Errc::NonpositiveVariance, "wrapped Gaussian needs variance > 0");
  // Aliases beyond |x + 2 pi k| > 6 sigma + pi contribute < 1e-12 of the peak.
  const double sigma = std::sqrt(variance);
  series_terms_ = static_cast<int>(std::ceil((6.0 * sigma + kPi) / kTwoPi)) + 1;
}

double WrappedGaussian::pdf(double x) const {
  const double sigma = std::sqrt(variance_);
  const double norm = 1.0 / (sigma * std::sqrt(kTwoPi));
  double sum = 0.0;
  for (int k = -series_terms_; k <= series_terms_; ++k) {
    const double u = x + kTwoPi * static_cast<double>(k);
    sum += std::exp(-0.5 * u * u / variance_);
  }
  return norm * sum;
}

double WrappedGaussian::sample(Rng& rng) const {
  return wrap(rng.normal(std::sqrt(variance_)));
}

double wrapped_pdf(double x, double variance) {
  return WrappedGaussian(variance).pdf(x);
}

double sample_wrapped(double variance, Rng& rng) {
  return WrappedGaussian(variance).sample(rng);
}

PoseGraph split_large_variance_edges(const PoseGraph& g, double threshold) {
  if (!(threshold > 0.0)) raise(Errc::OutOfRange, "split threshold must be > 0");

  bool any = false;
  for (int e = 0; e < g.m(); ++e) {
    if (3.0 * std::sqrt(g.variances[e]) > threshold) {
      any = true;
      break;
    }
  }
  if (!any) return g;

  std::vector<EdgeSpec> specs;
  specs.reserve(g.edges.size());
  int next_node = g.node_count;
  for (int e = 0; e < g.m(); ++e) {
    const double sigma = std::sqrt(g.variances[e]);
    const EdgeRecord& rec = g.edges[e];
    if (3.0 * sigma <= threshold) {
      specs.push_back({rec.tail, rec.head, g.measurements[e], g.variances[e]});
      continue;
    }
    // Smallest q with 3 sigma / sqrt(q) <= threshold; the composition of the
    // q sub-edges reproduces the original measurement and variance (wrapped
    // Gaussians are closed under convolution).
    const double ratio = 3.0 * sigma / threshold;
    auto q = static_cast<long long>(std::ceil(ratio * ratio));
    while (3.0 * sigma / std::sqrt(static_cast<double>(q)) > threshold) ++q;
    const double sub_meas = wrap(g.measurements[e] / static_cast<double>(q));
    const double sub_var = g.variances[e] / static_cast<double>(q);
    int prev = rec.tail;
    for (long long s = 0; s + 1 < q; ++s) {
      specs.push_back({prev, next_node, sub_meas, sub_var});
      prev = next_node++;
    }
    specs.push_back({prev, rec.head, sub_meas, sub_var});
  }
  return build_graph(next_node, specs);
}

}  // namespace mole2d
