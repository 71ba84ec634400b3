#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mole2d {

/// One verification check with its pinned tolerance already applied.
struct CriterionResult {
  std::string id;       // stable short id, e.g. "identity.projections"
  bool pass = false;
  bool gating = true;   // non-gating checks report but never fail a run
  std::string details;  // measured values vs thresholds
  double seconds = 0.0;
};

enum class Suite {
  Identity,        // projection identity + objective separability
  Oracle,          // ML-vs-grid-search equivalence, basis optimality, estimator distribution
  Coverage,        // screening coverage at alpha = 0.9 and 0.99
  Counterexample,  // canonical circle instance, basis effect on |Gamma|, bootstrap cost equality
  Wraparound,      // cycle-noise wraparound probability + wrapped-Gaussian model
  All,
};

struct VerifyOptions {
  int trials = 500;          // Monte Carlo trials for the coverage suite
  std::uint64_t seed = 42;
  int workers = 1;
  std::string intel_file;    // optional user-supplied dataset for the spot check
  bool large_budget = true;  // include the m ~ 5000 end-to-end runtime check
};

std::vector<CriterionResult> run_suite(Suite suite, const VerifyOptions& options);

const char* suite_name(Suite suite);

}  // namespace mole2d
