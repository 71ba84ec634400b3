#include "mole2d/io.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>

#include "mole2d/angles.hpp"
#include "mole2d/errors.hpp"

namespace mole2d {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct RawEdge {
  long long i = 0, j = 0;
  double dx = 0, dy = 0, dth = 0;
  std::array<double, 6> info{};  // internal order: xx xy xt yy yt tt
};

struct RawFile {
  std::map<long long, Se2Vertex> vertices;
  std::vector<RawEdge> edges;
  std::vector<std::string> warnings;
};

[[noreturn]] void malformed(int line_no, const std::string& why) {
  raise(Errc::MalformedLine, "line " + std::to_string(line_no) + ": " + why);
}

RawFile scan_file(std::string_view text, FileFormat format) {
  const std::string vertex_tag = format == FileFormat::G2o ? "VERTEX_SE2" : "VERTEX2";
  const std::string edge_tag = format == FileFormat::G2o ? "EDGE_SE2" : "EDGE2";

  RawFile raw;
  std::istringstream stream{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag.empty() || tag[0] == '#') continue;

    if (tag == vertex_tag) {
      long long id;
      Se2Vertex v;
      if (!(ls >> id >> v.x >> v.y >> v.theta)) malformed(line_no, "bad vertex fields");
      if (!raw.vertices.emplace(id, v).second)
        raw.warnings.push_back("line " + std::to_string(line_no) + ": duplicate vertex " +
                               std::to_string(id) + " ignored");
    } else if (tag == edge_tag) {
      RawEdge e;
      double f[6];
      if (!(ls >> e.i >> e.j >> e.dx >> e.dy >> e.dth >> f[0] >> f[1] >> f[2] >> f[3] >>
            f[4] >> f[5]))
        malformed(line_no, "bad edge fields");
      if (format == FileFormat::G2o) {
        // file order: I11 I12 I13 I22 I23 I33 == xx xy xt yy yt tt
        e.info = {f[0], f[1], f[2], f[3], f[4], f[5]};
      } else {
        // declared TORO order: Ixx Ixy Iyy Itt Ixt Iyt
        e.info = {f[0], f[1], f[4], f[2], f[5], f[3]};
      }
      raw.edges.push_back(e);
    } else {
      raw.warnings.push_back("line " + std::to_string(line_no) + ": unknown tag '" + tag +
                             "' skipped");
    }
  }
  return raw;
}

}  // namespace

PoseGraph2D parse_pose_graph(std::string_view text, FileFormat format) {
  RawFile raw = scan_file(text, format);

  // Dense relabeling over every id that appears, ascending, so trajectory
  // files keep consecutive indices.
  std::map<long long, int> dense;
  for (const auto& [id, v] : raw.vertices) dense.emplace(id, 0);
  for (const RawEdge& e : raw.edges) {
    if (dense.emplace(e.i, 0).second)
      raw.warnings.push_back("vertex " + std::to_string(e.i) +
                             " only referenced by edges; created at origin");
    if (dense.emplace(e.j, 0).second)
      raw.warnings.push_back("vertex " + std::to_string(e.j) +
                             " only referenced by edges; created at origin");
  }
  int next = 0;
  for (auto& [id, idx] : dense) idx = next++;

  PoseGraph2D out;
  out.warnings = std::move(raw.warnings);
  out.vertices.resize(dense.size());
  out.external_ids.resize(dense.size());
  for (const auto& [id, idx] : dense) {
    out.external_ids[idx] = id;
    const auto it = raw.vertices.find(id);
    out.vertices[idx] = it == raw.vertices.end() ? Se2Vertex{} : it->second;
  }

  std::vector<EdgeSpec> orientation_edges;
  orientation_edges.reserve(raw.edges.size());
  out.se2_edges.reserve(raw.edges.size());
  for (const RawEdge& e : raw.edges) {
    const double info_tt = e.info[5];
    if (!(info_tt > 0.0))
      raise(Errc::NonpositiveInformation,
            "edge " + std::to_string(e.i) + "->" + std::to_string(e.j) +
                " has theta-theta information " + fmt(info_tt));
    Se2Edge edge;
    edge.tail = dense.at(e.i);
    edge.head = dense.at(e.j);
    edge.dx = e.dx;
    edge.dy = e.dy;
    edge.dtheta = e.dth;
    edge.info = e.info;
    out.se2_edges.push_back(edge);
    // only the theta-theta entry feeds the orientation sub-problem
    orientation_edges.push_back({edge.tail, edge.head, e.dth, 1.0 / info_tt});
  }

  out.orientation = build_graph(static_cast<int>(dense.size()), orientation_edges);
  return out;
}

PoseGraph2D parse_g2o(std::string_view text) {
  return parse_pose_graph(text, FileFormat::G2o);
}

PoseGraph2D parse_toro(std::string_view text) {
  return parse_pose_graph(text, FileFormat::Toro);
}

// ---------------------------------------------------------------------------
// Position recovery
// ---------------------------------------------------------------------------

namespace {

std::array<double, 2> rotate(double theta, double x, double y) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * x - s * y, s * x + c * y};
}

double theta_of(const Eigen::VectorXd& theta, int node) {
  return node == 0 ? 0.0 : theta[node - 1];
}

}  // namespace

std::vector<std::array<double, 2>> solve_positions_given_orientations(
    const PoseGraph2D& g2, const Eigen::VectorXd& theta) {
  const PoseGraph& g = g2.orientation;
  if (theta.size() != g.n()) raise(Errc::OutOfRange, "theta must cover nodes 1..n");
  const int n = g.n();

  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * n);
  auto add_block = [&](int a, int c, const Eigen::Matrix2d& w, double sgn) {
    for (int r = 0; r < 2; ++r)
      for (int q = 0; q < 2; ++q)
        trip.emplace_back(2 * a + r, 2 * c + q, sgn * w(r, q));
  };

  for (const Se2Edge& e : g2.se2_edges) {
    Eigen::Matrix2d w;
    w << e.info[0], e.info[1], e.info[1], e.info[3];
    if (!(w(0, 0) > 0.0) || !(w.determinant() > 0.0))
      raise(Errc::NonpositiveInformation, "position information block not positive definite");
    const auto r = rotate(theta_of(theta, e.tail), e.dx, e.dy);
    const Eigen::Vector2d rv(r[0], r[1]);
    const int t = e.tail - 1, h = e.head - 1;  // -1 marks the fixed node 0
    if (t >= 0) {
      add_block(t, t, w, +1.0);
      b.segment<2>(2 * t) -= w * rv;
    }
    if (h >= 0) {
      add_block(h, h, w, +1.0);
      b.segment<2>(2 * h) += w * rv;
    }
    if (t >= 0 && h >= 0) {
      add_block(t, h, w, -1.0);
      add_block(h, t, w, -1.0);
    }
  }

  Eigen::SparseMatrix<double> h_mat(2 * n, 2 * n);
  h_mat.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(h_mat);
  if (ldlt.info() != Eigen::Success)
    raise(Errc::Disconnected, "position system is singular");
  const Eigen::VectorXd x = ldlt.solve(b);

  std::vector<std::array<double, 2>> positions(g.node_count, {0.0, 0.0});
  for (int i = 1; i < g.node_count; ++i)
    positions[i] = {x[2 * (i - 1)], x[2 * (i - 1) + 1]};
  return positions;
}

namespace {

std::vector<std::array<double, 2>> integrate_tree_positions(
    const PoseGraph2D& g2, const Eigen::VectorXd& theta, TreeStrategy strategy) {
  const PoseGraph& g = g2.orientation;
  const SpanningTree tree = spanning_tree(g, strategy);
  std::vector<std::array<double, 2>> positions(g.node_count, {0.0, 0.0});
  // parent pointers are rooted at node 0, so children follow their parents
  std::vector<int> order(g.node_count);
  for (int v = 0; v < g.node_count; ++v) order[v] = v;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return tree.depth[a] < tree.depth[b]; });
  for (int v : order) {
    if (v == 0) continue;
    const int u = tree.parent_node[v];
    const Se2Edge& e = g2.se2_edges[tree.parent_edge[v]];
    if (e.tail == u) {
      const auto d = rotate(theta_of(theta, u), e.dx, e.dy);
      positions[v] = {positions[u][0] + d[0], positions[u][1] + d[1]};
    } else {
      const auto d = rotate(theta_of(theta, v), e.dx, e.dy);
      positions[v] = {positions[u][0] - d[0], positions[u][1] - d[1]};
    }
  }
  return positions;
}

void append_vertex_lines(std::string& text, const PoseGraph2D& g2,
                         const std::vector<std::array<double, 2>>& positions,
                         const Eigen::VectorXd& theta) {
  for (size_t i = 0; i < g2.vertices.size(); ++i) {
    text += "VERTEX_SE2 " + std::to_string(g2.external_ids[i]) + " " +
            fmt(positions[i][0]) + " " + fmt(positions[i][1]) + " " +
            fmt(theta_of(theta, static_cast<int>(i))) + "\n";
  }
}

void append_edge_lines(std::string& text, const PoseGraph2D& g2) {
  for (const Se2Edge& e : g2.se2_edges) {
    text += "EDGE_SE2 " + std::to_string(g2.external_ids[e.tail]) + " " +
            std::to_string(g2.external_ids[e.head]) + " " + fmt(e.dx) + " " + fmt(e.dy) +
            " " + fmt(e.dtheta);
    for (double v : e.info) text += " " + fmt(v);
    text += "\n";
  }
}

}  // namespace

std::string write_bootstrapped(const PoseGraph2D& g2,
                               const OrientationHypothesis& hypothesis,
                               PositionMode mode) {
  if (hypothesis.theta_wrapped.size() != g2.orientation.n())
    raise(Errc::OutOfRange, "hypothesis does not cover every node");

  const std::vector<std::array<double, 2>> positions =
      mode == PositionMode::Linear
          ? solve_positions_given_orientations(g2, hypothesis.theta_wrapped)
          : integrate_tree_positions(g2, hypothesis.theta_wrapped,
                                     TreeStrategy::Odometric);

  std::string text;
  append_vertex_lines(text, g2, positions, hypothesis.theta_wrapped);
  append_edge_lines(text, g2);
  return text;
}

// ---------------------------------------------------------------------------
// Synthetic-instance export
// ---------------------------------------------------------------------------

std::string write_g2o(const GroundTruthInstance& inst) {
  const PoseGraph& g = inst.graph;
  const SpanningTree tree = spanning_tree(g, TreeStrategy::Odometric);

  // Unit forward moves along the trajectory reproduce the generator layouts
  // (polygon vertices, grid cells).
  std::vector<std::array<double, 2>> positions(g.node_count, {0.0, 0.0});
  for (int v = 1; v < g.node_count; ++v) {
    const int u = tree.parent_node[v];
    const auto step = rotate(theta_of(inst.theta_true, u), 1.0, 0.0);
    positions[v] = {positions[u][0] + step[0], positions[u][1] + step[1]};
  }

  std::string text;
  for (int i = 0; i < g.node_count; ++i)
    text += "VERTEX_SE2 " + std::to_string(i) + " " + fmt(positions[i][0]) + " " +
            fmt(positions[i][1]) + " " + fmt(theta_of(inst.theta_true, i)) + "\n";
  for (int e = 0; e < g.m(); ++e) {
    const EdgeRecord& rec = g.edges[e];
    const double dxw = positions[rec.head][0] - positions[rec.tail][0];
    const double dyw = positions[rec.head][1] - positions[rec.tail][1];
    const auto d = rotate(-theta_of(inst.theta_true, rec.tail), dxw, dyw);
    text += "EDGE_SE2 " + std::to_string(rec.tail) + " " + std::to_string(rec.head) +
            " " + fmt(d[0]) + " " + fmt(d[1]) + " " + fmt(g.measurements[e]) +
            " 100 0 0 100 0 " + fmt(1.0 / g.variances[e]) + "\n";
  }
  return text;
}

std::string write_truth_sidecar(const GroundTruthInstance& inst) {
  std::string text = "TRUTH_THETA 0 0\n";
  for (long i = 0; i < inst.theta_true.size(); ++i)
    text += "TRUTH_THETA " + std::to_string(i + 1) + " " + fmt(inst.theta_true[i]) + "\n";

  CycleBasisMatrix basis;
  try {
    basis = fundamental_cycle_basis(inst.graph,
                                    spanning_tree(inst.graph, TreeStrategy::Odometric));
  } catch (const Error&) {
    basis = fundamental_cycle_basis(
        inst.graph, spanning_tree(inst.graph, TreeStrategy::MinimumUncertainty));
  }
  text += "TRUTH_GAMMA";
  for (long long v : true_gamma(inst, basis)) text += " " + std::to_string(v);
  text += "\n";
  return text;
}

}  // namespace mole2d
