#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "pcd/core_model.hpp"
#include "pcd/dispatch.hpp"

namespace pcd {

// True iff every completed on-run lasts >= min_up and every completed
// off-run lasts >= min_down. The initial state contributes its accumulated
// duration to the first run; runs cut off by the horizon end are not checked.
bool is_feasible_commitment(const CaseDefinition& c, const CommitmentSchedule& x);

// Start-up and shut-down costs over the horizon, including transitions out
// of the initial state at t = 1.
double transition_costs(const CaseDefinition& c, const CommitmentSchedule& x);

struct ExtensiveFormResult {
  CommitmentSchedule schedule;
  double score = 0.0;  // transition costs + mean dispatch cost over scenarios
};

// Exhaustive extensive-form solve: enumerates all 2^(G*T) commitments,
// keeps the feasible ones, scores each against every scenario, and returns
// the minimizer (ties broken by lexicographically smallest schedule).
// Guarded to G*T <= 20 binaries.
ExtensiveFormResult solve_extensive_form(const CaseDefinition& c,
                                         const std::vector<std::vector<double>>& scenarios,
                                         int threads = 1);

struct McEvaluator {
  long n = 1000;
  std::uint64_t seed = 1;
};
struct PceEvaluator {
  int order = 2;
  int level = 3;
};
using ExpectationMethod = std::variant<McEvaluator, PceEvaluator>;

// transition_costs(x) + an estimate of the expected dispatch cost, via
// Monte Carlo sampling or a polynomial-chaos surrogate mean.
double expected_cost_of_commitment(const CaseDefinition& c, const CommitmentSchedule& x,
                                   const ExpectationMethod& method, int threads = 1);

}  // namespace pcd
