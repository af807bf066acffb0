#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pcd/core_model.hpp"
#include "pcd/lp.hpp"

namespace pcd {

// Binary on/off decisions per (generator, period). Period 0 is implicit and
// taken from each generator's initial_on.
struct CommitmentSchedule {
  int n_gens = 0;
  int n_periods = 0;
  std::vector<std::uint8_t> x;  // generator-major, x[g * n_periods + t]

  static CommitmentSchedule all_on(int gens, int periods) {
    CommitmentSchedule s;
    s.n_gens = gens;
    s.n_periods = periods;
    s.x.assign(static_cast<std::size_t>(gens) * periods, 1);
    return s;
  }

  std::uint8_t at(int g, int t) const { return x[static_cast<std::size_t>(g) * n_periods + t]; }
  void set(int g, int t, std::uint8_t v) { x[static_cast<std::size_t>(g) * n_periods + t] = v; }

  // One "0101..." string per generator row.
  std::vector<std::string> row_strings() const;
};

struct DispatchSolution {
  std::vector<double> p;        // generator-major power, p[g * T + t]
  std::vector<double> shed;     // q, unmet MW per period
  std::vector<double> surplus;  // absorbed over-generation MW per period
  double production_cost = 0.0;
  double penalty_cost = 0.0;
  double total = 0.0;  // Q(x, D)
};

// Maximum allowed increase of p between consecutive periods given the
// commitment transition.
double ramp_up_limit(const GeneratorUnit& g, int x_prev, int x_now);
// Maximum allowed decrease, symmetric formula.
double ramp_down_limit(const GeneratorUnit& g, int x_prev, int x_now);

// The dispatch LP together with its variable layout, so solutions can be
// mapped back and the demand-dependent right-hand side can be swapped.
struct EdModel {
  LinearProgram lp;
  int n_gens = 0;
  int n_periods = 0;
  int n_segments = 0;
  int q_base = 0;        // first shed variable
  int surplus_base = 0;  // first surplus variable
  double objective_constant = 0.0;  // committed fixed costs
  std::vector<double> pmin_committed;  // per period, sum of p_min over on units
  std::vector<PiecewiseLinearCost> plcs;

  int seg_var(int g, int t, int s) const {
    return (g * n_periods + t) * n_segments + s;
  }
  // Overwrites the balance right-hand sides for a new demand vector.
  void set_demand(std::span<const double> demand);
};

EdModel build_ed_model(const CaseDefinition& c, const CommitmentSchedule& x,
                       std::span<const double> demand);

// The raw LP form of the dispatch problem (variables: per-segment generation,
// then shed, then surplus; rows: per-period balance, then ramp pairs).
LinearProgram build_ed_lp(const CaseDefinition& c, const CommitmentSchedule& x,
                          std::span<const double> demand);

DispatchSolution solve_ed(const CaseDefinition& c, const CommitmentSchedule& x,
                          std::span<const double> demand);

// Reusable evaluator for many demand realizations under one commitment:
// the LP skeleton is built once and only the balance rows change.
class EdEvaluator {
 public:
  EdEvaluator(const CaseDefinition& c, const CommitmentSchedule& x);

  double evaluate(std::span<const double> demand) const;        // Q(x, D)
  DispatchSolution solve(std::span<const double> demand) const;

 private:
  mutable EdModel model_;
  std::vector<double> committed_pmin_;  // p_min * x per (g, t)
};

}  // namespace pcd
