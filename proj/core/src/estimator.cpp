#include "mole2d/estimator.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <string>

#include "mole2d/angles.hpp"
#include "mole2d/errors.hpp"
#include "mole2d/linalg.hpp"

namespace mole2d {

GammaEstimate gamma_estimator(const PoseGraph& g, const CycleBasisMatrix& basis) {
  if (basis.edge_count != g.m())
    raise(Errc::OutOfRange, "basis and graph disagree on edge count");
  GammaEstimate est;
  est.gamma_hat = basis.apply(g.measurements) / kTwoPi;
  const int ell = basis.ell();
  est.covariance.resize(ell, ell);
  // C P C^T assembled row against row through the shared diagonal weights.
  for (int r = 0; r < ell; ++r) {
    for (int c = r; c < ell; ++c) {
      double acc = 0.0;
      auto it_r = basis.rows[r].begin();
      auto it_c = basis.rows[c].begin();
      while (it_r != basis.rows[r].end() && it_c != basis.rows[c].end()) {
        if (it_r->edge < it_c->edge) {
          ++it_r;
        } else if (it_c->edge < it_r->edge) {
          ++it_c;
        } else {
          acc += static_cast<double>(it_r->sign * it_c->sign) * g.variances[it_r->edge];
          ++it_r;
          ++it_c;
        }
      }
      est.covariance(r, c) = est.covariance(c, r) = acc / (kTwoPi * kTwoPi);
    }
  }
  return est;
}

// ---------------------------------------------------------------------------
// INTEGER-SCREENING
// ---------------------------------------------------------------------------

namespace {

std::vector<long long> integers_in(double lo, double hi) {
  std::vector<long long> out;
  // closed interval: integers exactly on a boundary are admitted
  const double first = std::ceil(lo);
  for (double v = first; v <= hi; v += 1.0) out.push_back(static_cast<long long>(v));
  return out;
}

}  // namespace

double HypothesisSet::log10_count() const {
  double acc = 0.0;
  for (const auto& set : per_coordinate) acc += std::log10(static_cast<double>(set.size()));
  return acc;
}

std::optional<std::uint64_t> HypothesisSet::count() const {
  std::uint64_t acc = 1;
  for (const auto& set : per_coordinate) {
    const std::uint64_t card = set.size();
    if (card != 0 && acc > std::numeric_limits<std::uint64_t>::max() / card)
      return std::nullopt;
    acc *= card;
  }
  return acc;
}

bool HypothesisSet::exceeds(std::uint64_t cap) const {
  const auto exact = count();
  return !exact.has_value() || *exact > cap;
}

HypothesisSet integer_screening(const GammaEstimate& estimate, double alpha,
                                std::uint64_t cap) {
  if (!(alpha > 0.0 && alpha < 1.0))
    raise(Errc::OutOfRange, "confidence level must be in (0,1)");
  if (cap < 1) raise(Errc::OutOfRange, "hypothesis cap must be >= 1");

  const int ell = estimate.ell();
  HypothesisSet set;
  set.per_coordinate.assign(ell, {});
  set.diagnostics.alpha = alpha;
  if (ell == 0) {
    set.diagnostics.eta = 1.0;
    return set;
  }

  const double eta = std::pow(alpha, 1.0 / static_cast<double>(ell));
  set.diagnostics.eta = eta;
  const double chi2 = chi2_quantile_1dof(eta);

  std::vector<int> remaining(ell);
  for (int i = 0; i < ell; ++i) remaining[i] = i;
  GaussianBelief belief{estimate.gamma_hat, estimate.covariance};

  while (!remaining.empty()) {
    std::vector<int> resolved_local;      // positions within `belief`
    std::vector<double> resolved_values;  // the unique integers
    for (size_t pos = 0; pos < remaining.size(); ++pos) {
      const int coord = remaining[pos];
      const double mean = belief.mean[static_cast<long>(pos)];
      const double var = std::max(belief.covariance(static_cast<long>(pos),
                                                    static_cast<long>(pos)),
                                  0.0);
      const double b = std::sqrt(var * chi2);
      std::vector<long long> candidates = integers_in(mean - b, mean + b);
      if (candidates.empty()) {
        // paper never hits this: fall back to the nearest integer and flag
        // the breached confidence guarantee
        candidates.push_back(static_cast<long long>(std::llround(mean)));
        set.diagnostics.empty_interval_coordinates.push_back(coord);
      }
      set.per_coordinate[coord] = candidates;
      if (candidates.size() == 1) {
        resolved_local.push_back(static_cast<int>(pos));
        resolved_values.push_back(static_cast<double>(candidates.front()));
      }
    }

    if (resolved_local.empty()) break;  // no progress
    set.diagnostics.iterations += 1;
    set.diagnostics.resolved_per_iteration.push_back(
        static_cast<int>(resolved_local.size()));

    std::vector<int> next_remaining;
    next_remaining.reserve(remaining.size() - resolved_local.size());
    {
      size_t cursor = 0;
      for (size_t pos = 0; pos < remaining.size(); ++pos) {
        if (cursor < resolved_local.size() &&
            resolved_local[cursor] == static_cast<int>(pos)) {
          ++cursor;
        } else {
          next_remaining.push_back(remaining[pos]);
        }
      }
    }
    if (next_remaining.empty()) break;  // everything determined

    belief = condition(belief, resolved_local, resolved_values);
    remaining = std::move(next_remaining);
  }

  set.diagnostics.cap_exceeded = set.exceeds(cap);
  return set;
}

// ---------------------------------------------------------------------------
// Orientation recovery
// ---------------------------------------------------------------------------

struct OrientationSolver::Impl {
  const PoseGraph* graph;
  WeightedLsSolver solver;

  Impl(const PoseGraph& g)
      : graph(&g), solver(incidence_matrices(g).reduced, g.variances) {}
};

OrientationSolver::OrientationSolver(const PoseGraph& g) : impl_(new Impl(g)) {}

OrientationSolver::~OrientationSolver() = default;
OrientationSolver::OrientationSolver(OrientationSolver&&) noexcept = default;
OrientationSolver& OrientationSolver::operator=(OrientationSolver&&) noexcept = default;

Eigen::VectorXd OrientationSolver::solve_edge_rhs(const Eigen::VectorXd& rhs) const {
  return impl_->solver.solve(rhs);
}

Eigen::VectorXd OrientationSolver::solve_given_k(std::span<const long long> k) const {
  Eigen::VectorXd rhs = impl_->graph->measurements;
  for (int e = 0; e < impl_->graph->m(); ++e)
    rhs[e] -= kTwoPi * static_cast<double>(k[e]);
  return solve_edge_rhs(rhs);
}

Eigen::VectorXd theta_given_k(const PoseGraph& g, std::span<const long long> k) {
  if (static_cast<int>(k.size()) != g.m())
    raise(Errc::OutOfRange, "regularization vector length mismatch");
  return OrientationSolver(g).solve_given_k(k);
}

double cost(const PoseGraph& g, const Eigen::VectorXd& theta) {
  if (theta.size() != g.n()) raise(Errc::OutOfRange, "theta length mismatch");
  double acc = 0.0;
  for (int e = 0; e < g.m(); ++e) {
    const EdgeRecord& rec = g.edges[e];
    const double th_tail = rec.tail == 0 ? 0.0 : theta[rec.tail - 1];
    const double th_head = rec.head == 0 ? 0.0 : theta[rec.head - 1];
    const double r = wrap(th_head - th_tail - g.measurements[e]);
    acc += r * r / g.variances[e];
  }
  return acc;
}

namespace {

OrientationHypothesis hypothesis_from_gamma(const PoseGraph& g,
                                            const PseudoinverseApplier& applier,
                                            const OrientationSolver& solver,
                                            std::vector<long long> gamma) {
  OrientationHypothesis hyp;
  const std::vector<long long> k = applier.apply(gamma);
  hyp.gamma = std::move(gamma);
  hyp.theta_real = solver.solve_given_k(k);
  hyp.theta_wrapped.resize(hyp.theta_real.size());
  for (long i = 0; i < hyp.theta_real.size(); ++i)
    hyp.theta_wrapped[i] = wrap(hyp.theta_real[i]);
  hyp.cost = cost(g, hyp.theta_wrapped);
  return hyp;
}

}  // namespace

OrientationHypothesis theta_given_gamma(const PoseGraph& g,
                                        const CycleBasisMatrix& basis,
                                        std::span<const long long> gamma) {
  return hypothesis_from_gamma(g, PseudoinverseApplier(basis), OrientationSolver(g),
                               std::vector<long long>(gamma.begin(), gamma.end()));
}

// ---------------------------------------------------------------------------
// MOLE2D pipeline
// ---------------------------------------------------------------------------

namespace {

CycleBasisMatrix make_basis(const PoseGraph& g, BasisKind kind) {
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

bool lex_less(const std::vector<long long>& a, const std::vector<long long>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

Mole2dResult mole2d(const PoseGraph& g, const Mole2dOptions& options) {
  Mole2dResult result;
  result.basis = make_basis(g, options.basis);
  result.estimate = gamma_estimator(g, result.basis);
  result.screening = integer_screening(result.estimate, options.alpha, options.max_hypotheses);
  result.screening.diagnostics.basis = options.basis;

  if (result.screening.diagnostics.cap_exceeded) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.1f", result.screening.log10_count());
    raise(Errc::CapExceeded, "|Gamma| ~ 10^" + std::string(buf) + " exceeds cap " +
                                 std::to_string(options.max_hypotheses));
  }

  const std::uint64_t total = result.screening.count().value();
  const int ell = result.basis.ell();

  // Lexicographic enumeration of the Cartesian product.
  std::vector<std::vector<long long>> gammas;
  gammas.reserve(total);
  std::vector<size_t> idx(ell, 0);
  for (std::uint64_t item = 0; item < total; ++item) {
    std::vector<long long> gamma(ell);
    for (int i = 0; i < ell; ++i)
      gamma[i] = result.screening.per_coordinate[i][idx[i]];
    gammas.push_back(std::move(gamma));
    for (int i = ell - 1; i >= 0; --i) {
      if (++idx[i] < result.screening.per_coordinate[i].size()) break;
      idx[i] = 0;
    }
  }

  const PseudoinverseApplier applier(result.basis);
  const OrientationSolver solver(g);
  result.hypotheses.resize(gammas.size());

  const int workers = std::max(1, options.workers);
  if (workers == 1 || gammas.size() < 2) {
    for (size_t i = 0; i < gammas.size(); ++i)
      result.hypotheses[i] =
          hypothesis_from_gamma(g, applier, solver, std::move(gammas[i]));
  } else {
    // fan out per hypothesis; the final sort makes the merge deterministic
    std::atomic<size_t> next{0};
    auto work = [&]() {
      for (size_t i = next.fetch_add(1); i < gammas.size(); i = next.fetch_add(1))
        result.hypotheses[i] =
            hypothesis_from_gamma(g, applier, solver, std::move(gammas[i]));
    };
    std::vector<std::future<void>> tasks;
    for (int w = 0; w < workers; ++w)
      tasks.push_back(std::async(std::launch::async, work));
    for (auto& t : tasks) t.get();
  }

  std::sort(result.hypotheses.begin(), result.hypotheses.end(),
            [](const OrientationHypothesis& a, const OrientationHypothesis& b) {
              if (a.cost != b.cost) return a.cost < b.cost;
              return lex_less(a.gamma, b.gamma);
            });
  return result;
}

// ---------------------------------------------------------------------------
// Desk-scale maximum likelihood search
// ---------------------------------------------------------------------------

MlSearchResult ml_search(const GammaEstimate& estimate, int radius, std::uint64_t budget) {
  if (radius < 0) raise(Errc::OutOfRange, "radius must be >= 0");
  const int ell = estimate.ell();

  MlSearchResult best;
  best.objective = std::numeric_limits<double>::infinity();
  best.runner_up_objective = std::numeric_limits<double>::infinity();
  if (ell == 0) {
    best.objective = 0.0;
    return best;
  }

  std::vector<long long> lo(ell), hi(ell);
  double points = 1.0;
  for (int i = 0; i < ell; ++i) {
    lo[i] = static_cast<long long>(std::ceil(estimate.gamma_hat[i] - radius));
    hi[i] = static_cast<long long>(std::floor(estimate.gamma_hat[i] + radius));
    if (hi[i] < lo[i]) hi[i] = lo[i] = std::llround(estimate.gamma_hat[i]);
    points *= static_cast<double>(hi[i] - lo[i] + 1);
  }
  if (points > static_cast<double>(budget))
    raise(Errc::BudgetExceeded,
          "box search needs " + std::to_string(points) + " points, budget " +
              std::to_string(budget));

  const Eigen::LLT<Eigen::MatrixXd> llt(estimate.covariance);
  if (llt.info() != Eigen::Success)
    raise(Errc::NotPositiveDefinite, "gamma covariance is not SPD");

  std::vector<long long> current = lo;
  Eigen::VectorXd residual(ell);
  for (;;) {
    for (int i = 0; i < ell; ++i)
      residual[i] = static_cast<double>(current[i]) - estimate.gamma_hat[i];
    const double objective = residual.dot(llt.solve(residual));
    if (objective < best.objective) {
      best.runner_up_objective = best.objective;
      best.objective = objective;
      best.gamma = current;
    } else if (objective < best.runner_up_objective) {
      best.runner_up_objective = objective;
    }

    int pos = ell - 1;
    while (pos >= 0 && current[pos] == hi[pos]) {
      current[pos] = lo[pos];
      --pos;
    }
    if (pos < 0) break;
    ++current[pos];
  }

  best.tie = std::isfinite(best.runner_up_objective) &&
             best.runner_up_objective - best.objective <= 1e-12;
  return best;
}

OrientationHypothesis ml_estimate(const PoseGraph& g, const CycleBasisMatrix& basis,
                                  const GammaEstimate& estimate, int radius,
                                  std::uint64_t budget) {
  const MlSearchResult search = ml_search(estimate, radius, budget);
  return theta_given_gamma(g, basis, search.gamma);
}

}  // namespace mole2d
