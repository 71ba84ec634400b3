#pragma once

#include <cstdint>

#include "mole2d/oracle.hpp"

namespace mole2d {

enum class NoiseMode { Gaussian, FixedValue };

/// Regular polygon trajectory: true orientations wrap(i * 2 pi / steps),
/// path edges i -> i+1 plus the closing edge back to node 0. FixedValue mode
/// adds exactly `noise_value_or_sigma` to every edge (per-edge variance set
/// to its square); Gaussian mode samples N(0, sigma^2) per edge.
GroundTruthInstance circle_graph(int steps, double noise_value_or_sigma,
                                 NoiseMode mode, std::uint64_t seed = 0);

/// Lawnmower sweep over a rows x cols grid with 90-degree turns; every
/// grid-adjacent cell pair not already linked by the path is a loop-closure
/// slot, taken with probability chord_prob. Orientation noise is wrapped
/// Gaussian with the given sigma.
GroundTruthInstance grid_walk(int rows, int cols, double chord_prob,
                              double sigma_theta, std::uint64_t seed);

/// Same family with an exact chord count (clamped to the available slots);
/// used by the Monte Carlo trial generator.
GroundTruthInstance grid_walk_with_chords(int rows, int cols, int chords,
                                          double sigma_theta, std::uint64_t seed);

/// Adds independent N(0, extra_sigma^2) noise to every measurement and
/// extra_sigma^2 to every variance; the stored ground truth (and hence
/// gamma_true) is updated consistently.
GroundTruthInstance inject_orientation_noise(const GroundTruthInstance& inst,
                                             double extra_sigma, std::uint64_t seed);

}  // namespace mole2d
