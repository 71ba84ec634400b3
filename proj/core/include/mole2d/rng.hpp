#pragma once

#include <cstdint>
#include <random>

namespace mole2d {

/// Deterministic random source. The engine is std::mt19937_64 (a fully
/// specified algorithm) and floating-point draws are produced with explicit
/// arithmetic rather than std::*_distribution, so a given seed reproduces the
/// same stream on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on (0, 1): 53-bit mantissa, offset by half an ulp so the
  /// endpoints are never hit (safe to feed to inverse CDFs).
  double uniform01();

  double uniform(double lo, double hi);

  /// Inclusive on both ends.
  int uniform_int(int lo, int hi);

  /// N(0, sigma^2) via inverse-CDF sampling of uniform01().
  double normal(double sigma);

  /// Seed for an independent child stream (splitmix64 of root and stream id).
  static std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

 private:
  std::mt19937_64 engine_;
};

}  // namespace mole2d
