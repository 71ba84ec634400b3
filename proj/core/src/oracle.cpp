#include "mole2d/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <future>
#include <limits>

#include "mole2d/angles.hpp"
#include "mole2d/errors.hpp"
#include "mole2d/estimator.hpp"
#include "mole2d/rng.hpp"
#include "mole2d/synth.hpp"

namespace mole2d {

GroundTruthInstance make_ground_truth_instance(int node_count,
                                               std::span<const EdgeTopology> edges,
                                               const Eigen::VectorXd& theta_true,
                                               const Eigen::VectorXd& noise,
                                               const Eigen::VectorXd& variances) {
  if (theta_true.size() != node_count - 1)
    raise(Errc::OutOfRange, "theta_true must cover nodes 1..n");
  if (noise.size() != static_cast<long>(edges.size()) ||
      variances.size() != static_cast<long>(edges.size()))
    raise(Errc::OutOfRange, "noise/variance length mismatch");

  GroundTruthInstance inst;
  inst.theta_true.resize(theta_true.size());
  for (long i = 0; i < theta_true.size(); ++i) inst.theta_true[i] = wrap(theta_true[i]);
  inst.noise = noise;

  std::vector<EdgeSpec> specs(edges.size());
  for (size_t e = 0; e < edges.size(); ++e) {
    const double th_tail = edges[e].tail == 0 ? 0.0 : inst.theta_true[edges[e].tail - 1];
    const double th_head = edges[e].head == 0 ? 0.0 : inst.theta_true[edges[e].head - 1];
    specs[e] = {edges[e].tail, edges[e].head, wrap(th_head - th_tail + noise[e]),
                variances[e]};
  }
  inst.graph = build_graph(node_count, specs);
  return inst;
}

std::vector<long long> true_regularizers(const GroundTruthInstance& inst) {
  std::vector<long long> k(inst.graph.m());
  for (int e = 0; e < inst.graph.m(); ++e) {
    const EdgeRecord& rec = inst.graph.edges[e];
    const double th_tail = rec.tail == 0 ? 0.0 : inst.theta_true[rec.tail - 1];
    const double th_head = rec.head == 0 ? 0.0 : inst.theta_true[rec.head - 1];
    k[e] = regularizer(th_head - th_tail + inst.noise[e]);
  }
  return k;
}

std::vector<long long> true_gamma(const GroundTruthInstance& inst,
                                  const CycleBasisMatrix& basis) {
  return basis.apply_int(true_regularizers(inst));
}

// ---------------------------------------------------------------------------
// Grid search oracle
// ---------------------------------------------------------------------------

namespace {

// Golden-section line search on [lo, hi]; the slice of the wrapped objective
// is piecewise quadratic, good enough for a descent step.
double golden_min(const std::function<double(double)>& f, double lo, double hi) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int iter = 0; iter < 80 && (b - a) > 1e-12; ++iter) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? c : d;
}

double polish(const PoseGraph& g, Eigen::VectorXd& theta, double span) {
  double current = cost(g, theta);
  for (int sweep = 0; sweep < 200; ++sweep) {
    const double before = current;
    for (long j = 0; j < theta.size(); ++j) {
      const double center = theta[j];
      auto slice = [&](double v) {
        theta[j] = v;
        return cost(g, theta);
      };
      const double best = golden_min(slice, center - span, center + span);
      theta[j] = best;
      const double value = cost(g, theta);
      if (value <= current) {
        current = value;
      } else {
        theta[j] = center;
      }
    }
    if (before - current < 1e-9) break;
  }
  return current;
}

}  // namespace

GridSearchResult grid_search_angles(const PoseGraph& g, double resolution,
                                    GridSearchMode mode, std::uint64_t budget,
                                    std::uint64_t seed) {
  const int n = g.n();
  if (!(resolution > 0.0)) raise(Errc::OutOfRange, "resolution must be > 0");
  const auto steps = static_cast<std::uint64_t>(std::llround(kTwoPi / resolution));

  double points = 1.0;
  for (int i = 0; i < n; ++i) points *= static_cast<double>(steps);
  const bool grid_affordable = n <= 4 && points <= static_cast<double>(budget);
  if (mode == GridSearchMode::FullGrid && !grid_affordable)
    raise(Errc::BudgetExceeded, "full grid needs " + std::to_string(points) + " points");
  const bool full = mode == GridSearchMode::FullGrid ||
                    (mode == GridSearchMode::Auto && grid_affordable);

  GridSearchResult result;
  result.full_grid = full;
  Eigen::VectorXd best = Eigen::VectorXd::Zero(n);
  double best_cost = cost(g, best);

  if (full) {
    Eigen::VectorXd theta(n);
    std::vector<std::uint64_t> idx(n, 0);
    for (;;) {
      for (int i = 0; i < n; ++i)
        theta[i] = -kPi + resolution * static_cast<double>(idx[i] + 1);
      const double value = cost(g, theta);
      if (value < best_cost) {
        best_cost = value;
        best = theta;
      }
      int pos = n - 1;
      while (pos >= 0 && ++idx[pos] == steps) idx[pos--] = 0;
      if (pos < 0) break;
    }
    best_cost = polish(g, best, resolution);
  } else {
    Rng rng(seed);
    for (int start = 0; start < 100; ++start) {
      Eigen::VectorXd theta(n);
      for (int i = 0; i < n; ++i) theta[i] = rng.uniform(-kPi, kPi);
      const double value = polish(g, theta, kPi / 2.0);
      if (value < best_cost) {
        best_cost = value;
        best = theta;
      }
    }
  }

  for (int i = 0; i < n; ++i) best[i] = wrap(best[i]);
  result.theta = best;
  result.cost = best_cost;
  return result;
}

// ---------------------------------------------------------------------------
// Monte Carlo suites
// ---------------------------------------------------------------------------

namespace {

GroundTruthInstance coverage_trial_instance(const CoverageConfig& cfg, Rng& rng) {
  const int rows = rng.uniform_int(cfg.min_rows, cfg.max_rows);
  const int cols = rng.uniform_int(cfg.min_cols, cfg.max_cols);
  const int chords = rng.uniform_int(cfg.min_chords, cfg.max_chords);
  const double sigma = rng.uniform(cfg.min_sigma, cfg.max_sigma);

  // topology + variances from the grid family, then uniform random truth
  const GroundTruthInstance base =
      grid_walk_with_chords(rows, cols, chords, sigma, rng.next_u64());
  const PoseGraph& g = base.graph;

  std::vector<EdgeTopology> topo(g.edges.size());
  for (int e = 0; e < g.m(); ++e) topo[e] = {g.edges[e].tail, g.edges[e].head};

  Eigen::VectorXd theta(g.n());
  for (int i = 0; i < g.n(); ++i) theta[i] = rng.uniform(-kPi, kPi);
  Eigen::VectorXd noise = Eigen::VectorXd::Zero(g.m());
  if (!cfg.zero_noise)
    for (int e = 0; e < g.m(); ++e) noise[e] = rng.normal(std::sqrt(g.variances[e]));

  return make_ground_truth_instance(g.node_count, topo, theta, noise, g.variances);
}

CycleBasisMatrix coverage_basis(const PoseGraph& g, BasisKind kind) {
  switch (kind) {
    case BasisKind::FcbOdo:
      return fundamental_cycle_basis(g, spanning_tree(g, TreeStrategy::Odometric));
    case BasisKind::FcbMst:
      return fundamental_cycle_basis(g, spanning_tree(g, TreeStrategy::MinimumUncertainty));
    case BasisKind::Mcb:
      return minimum_cycle_basis(g);
  }
  raise(Errc::OutOfRange, "unknown basis kind");
}

}  // namespace

CoverageResult monte_carlo_coverage(const CoverageConfig& config, double alpha,
                                    int trials, std::uint64_t seed) {
  if (trials < 1) raise(Errc::OutOfRange, "need at least one trial");

  std::atomic<int> hits{0};
  std::atomic<int> cursor{0};
  auto run_trials = [&]() {
    for (int t = cursor.fetch_add(1); t < trials; t = cursor.fetch_add(1)) {
      Rng rng(Rng::derive_seed(seed, static_cast<std::uint64_t>(t)));
      const GroundTruthInstance inst = coverage_trial_instance(config, rng);
      const CycleBasisMatrix basis = coverage_basis(inst.graph, config.basis);
      const std::vector<long long> truth = true_gamma(inst, basis);
      const HypothesisSet set = integer_screening(
          gamma_estimator(inst.graph, basis), alpha,
          std::numeric_limits<std::uint64_t>::max());
      bool inside = true;
      for (size_t i = 0; i < truth.size() && inside; ++i)
        inside = std::binary_search(set.per_coordinate[i].begin(),
                                    set.per_coordinate[i].end(), truth[i]);
      if (inside) hits.fetch_add(1);
    }
  };

  const int workers = std::max(1, config.workers);
  if (workers == 1) {
    run_trials();
  } else {
    std::vector<std::future<void>> tasks;
    for (int w = 0; w < workers; ++w)
      tasks.push_back(std::async(std::launch::async, run_trials));
    for (auto& t : tasks) t.get();
  }

  CoverageResult out;
  out.trials = trials;
  out.hits = hits.load();
  out.fraction = static_cast<double>(out.hits) / static_cast<double>(trials);
  out.binomial_stderr = std::sqrt(alpha * (1.0 - alpha) / static_cast<double>(trials));
  return out;
}

WraparoundCheck wraparound_probability_check(double sigma_cycle, int trials,
                                             std::uint64_t seed) {
  if (trials < 1) raise(Errc::OutOfRange, "need at least one trial");
  if (!(sigma_cycle >= 0.0)) raise(Errc::OutOfRange, "sigma_cycle must be >= 0");

  WraparoundCheck out;
  out.trials = trials;
  out.analytic = sigma_cycle == 0.0
                     ? 0.0
                     : 1.0 - std::erf(kPi / (sigma_cycle * std::sqrt(2.0)));
  Rng rng(seed);
  int count = 0;
  for (int t = 0; t < trials; ++t)
    if (std::abs(rng.normal(sigma_cycle)) > kPi) ++count;
  out.empirical = static_cast<double>(count) / static_cast<double>(trials);
  return out;
}

}  // namespace mole2d
