#include "pcd/commitment.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pcd/estimators.hpp"
#include "pcd/parallel.hpp"
#include "pcd/pce.hpp"
#include "pcd/quadrature.hpp"

namespace pcd {

bool is_feasible_commitment(const CaseDefinition& c, const CommitmentSchedule& x) {
  const int G = static_cast<int>(c.generators.size());
  const int T = c.loads.periods();
  if (x.n_gens != G || x.n_periods != T)
    throw std::invalid_argument("commitment dimensions do not match the case");

  for (int g = 0; g < G; ++g) {
    const GeneratorUnit& gen = c.generators[g];
    int state = gen.initial_on ? 1 : 0;
    int run = gen.initial_state_duration;
    for (int t = 0; t < T; ++t) {
      const int now = x.at(g, t);
      if (now == state) {
        ++run;
        continue;
      }
      // completed run must satisfy its minimum duration
      if (state == 1 && run < gen.min_up) return false;
      if (state == 0 && run < gen.min_down) return false;
      state = now;
      run = 1;
    }
    // the final run is truncated by the horizon and not penalized
  }
  return true;
}

double transition_costs(const CaseDefinition& c, const CommitmentSchedule& x) {
  const int G = static_cast<int>(c.generators.size());
  const int T = c.loads.periods();
  if (x.n_gens != G || x.n_periods != T)
    throw std::invalid_argument("commitment dimensions do not match the case");

  double cost = 0.0;
  for (int g = 0; g < G; ++g) {
    const GeneratorUnit& gen = c.generators[g];
    int prev = gen.initial_on ? 1 : 0;
    for (int t = 0; t < T; ++t) {
      const int now = x.at(g, t);
      if (now > prev) cost += gen.startup_cost;
      if (now < prev) cost += gen.shutdown_cost;
      prev = now;
    }
  }
  return cost;
}

namespace {

CommitmentSchedule schedule_from_bits(int G, int T, std::uint32_t bits) {
  CommitmentSchedule s;
  s.n_gens = G;
  s.n_periods = T;
  const int k = G * T;
  s.x.resize(k);
  // most significant bit first, so increasing `bits` is lexicographic order
  for (int i = 0; i < k; ++i) s.x[i] = (bits >> (k - 1 - i)) & 1u;
  return s;
}

}  // namespace

ExtensiveFormResult solve_extensive_form(const CaseDefinition& c,
                                         const std::vector<std::vector<double>>& scenarios,
                                         int threads) {
  const int G = static_cast<int>(c.generators.size());
  const int T = c.loads.periods();
  const int k = G * T;
  if (k > 20)
    throw std::invalid_argument("extensive-form enumeration limited to 20 commitment binaries");
  if (scenarios.empty()) throw std::invalid_argument("scenario set is empty");
  for (const auto& s : scenarios)
    if (static_cast<int>(s.size()) != T)
      throw std::invalid_argument("scenario length does not match the horizon");

  const std::uint32_t total = 1u << k;
  std::vector<double> scores(total, std::numeric_limits<double>::quiet_NaN());
  const double rho = 1.0 / static_cast<double>(scenarios.size());

  parallel_for(total, threads, [&](std::size_t v) {
    CommitmentSchedule x = schedule_from_bits(G, T, static_cast<std::uint32_t>(v));
    if (!is_feasible_commitment(c, x)) return;
    EdEvaluator ev(c, x);
    double mean = 0.0;
    for (const auto& s : scenarios) mean += ev.evaluate(s);
    scores[v] = transition_costs(c, x) + rho * mean;
  });

  // scan in lexicographic order; strict improvement keeps the smallest tie
  std::uint32_t best = total;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::uint32_t v = 0; v < total; ++v) {
    if (std::isnan(scores[v])) continue;
    if (scores[v] < best_score) {
      best_score = scores[v];
      best = v;
    }
  }
  if (best == total) throw std::runtime_error("no feasible commitment exists");
  return ExtensiveFormResult{schedule_from_bits(G, T, best), best_score};
}

double expected_cost_of_commitment(const CaseDefinition& c, const CommitmentSchedule& x,
                                   const ExpectationMethod& method, int threads) {
  if (!is_feasible_commitment(c, x))
    throw std::invalid_argument("commitment violates minimum up/down times");
  const double trans = transition_costs(c, x);
  if (const auto* mc = std::get_if<McEvaluator>(&method)) {
    McEstimate est = mc_expected_cost(c, x, mc->n, mc->seed, threads);
    return trans + est.mean;
  }
  const auto& pc = std::get<PceEvaluator>(method);
  SparseGrid grid = smolyak_grid(c.loads.periods(), pc.level);
  MultiIndexSet idx = total_degree_indices(c.loads.periods(), pc.order);
  PCExpansion pce = project(c, x, idx, grid, nullptr, threads);
  return trans + pce_mean(pce);
}

}  // namespace pcd
