#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "mole2d/estimator.hpp"
#include "mole2d/graph.hpp"
#include "mole2d/oracle.hpp"

namespace mole2d {

struct Se2Vertex {
  double x = 0.0, y = 0.0, theta = 0.0;
};

/// info holds the upper triangle of the 3x3 information matrix in g2o order:
/// (xx, xy, xtheta, yy, ytheta, thetatheta).
struct Se2Edge {
  int tail = 0, head = 0;  // dense node indices
  double dx = 0.0, dy = 0.0, dtheta = 0.0;
  std::array<double, 6> info{};
};

/// SE(2) pose graph as read from a file, plus the derived orientation
/// sub-problem (only the theta-theta information entry feeds the orientation
/// variance). External vertex ids are remapped to a dense [0, n] range in
/// ascending id order; node 0 is the reference.
struct PoseGraph2D {
  std::vector<Se2Vertex> vertices;        // dense order
  std::vector<long long> external_ids;    // dense index -> original id
  std::vector<Se2Edge> se2_edges;
  PoseGraph orientation;
  std::vector<std::string> warnings;
};

enum class FileFormat { G2o, Toro };

/// Lines: `VERTEX_SE2 id x y theta` and
/// `EDGE_SE2 i j dx dy dth I11 I12 I13 I22 I23 I33`. Unknown tags are
/// skipped with a warning; vertices referenced only by edges are created at
/// the origin with a warning.
PoseGraph2D parse_g2o(std::string_view text);

/// Lines: `VERTEX2 id x y theta` and
/// `EDGE2 i j dx dy dth Ixx Ixy Iyy Itt Ixt Iyt` (this information ordering
/// is a declared convention; files using another one must be converted).
PoseGraph2D parse_toro(std::string_view text);

PoseGraph2D parse_pose_graph(std::string_view text, FileFormat format);

/// Positions from the weighted linear least-squares that remains once the
/// orientations are fixed: each relative (dx, dy) is rotated by the estimated
/// tail orientation. theta has length n (node 0 at zero); node 0 sits at the
/// origin. Returns one (x, y) per node.
std::vector<std::array<double, 2>> solve_positions_given_orientations(
    const PoseGraph2D& g2, const Eigen::VectorXd& theta);

enum class PositionMode { Odometry, Linear };

/// g2o text with the hypothesis orientations substituted into the vertices;
/// positions come from odometric integration along the spanning tree or from
/// the linear solve. Edges pass through unchanged, so the output is a
/// drop-in initial guess for an iterative pose-graph optimizer.
std::string write_bootstrapped(const PoseGraph2D& g2,
                               const OrientationHypothesis& hypothesis,
                               PositionMode mode);

/// Synthetic-instance export (g2o format). Positions are integrated from the
/// true orientations along the trajectory when available.
std::string write_g2o(const GroundTruthInstance& inst);

/// Ground-truth sidecar: `TRUTH_THETA id theta` per node and one
/// `TRUTH_GAMMA v1 v2 ...` line (gamma_true w.r.t. the odometric fundamental
/// basis when the instance is a trajectory, else the minimum-uncertainty one).
std::string write_truth_sidecar(const GroundTruthInstance& inst);

}  // namespace mole2d
