#include "pcd/dispatch.hpp"

#include <cmath>
#include <stdexcept>

namespace pcd {

std::vector<std::string> CommitmentSchedule::row_strings() const {
  std::vector<std::string> rows(n_gens);
  for (int g = 0; g < n_gens; ++g) {
    std::string& r = rows[g];
    r.reserve(n_periods);
    for (int t = 0; t < n_periods; ++t) r.push_back(at(g, t) ? '1' : '0');
  }
  return rows;
}

double ramp_up_limit(const GeneratorUnit& g, int x_prev, int x_now) {
  return g.ramp_up * x_prev + g.startup_ramp * (x_now - x_prev) + g.p_max * (1 - x_now);
}

double ramp_down_limit(const GeneratorUnit& g, int x_prev, int x_now) {
  return g.ramp_down * x_now + g.shutdown_ramp * (x_prev - x_now) + g.p_max * (1 - x_prev);
}

namespace {

void check_dims(const CaseDefinition& c, const CommitmentSchedule& x,
                std::span<const double> demand) {
  const int G = static_cast<int>(c.generators.size());
  const int T = c.loads.periods();
  if (x.n_gens != G || x.n_periods != T)
    throw std::invalid_argument("commitment dimensions do not match the case");
  if (static_cast<int>(demand.size()) != T)
    throw std::invalid_argument("demand vector length does not match the horizon");
}

}  // namespace

void EdModel::set_demand(std::span<const double> demand) {
  if (static_cast<int>(demand.size()) != n_periods)
    throw std::invalid_argument("demand vector length does not match the horizon");
  for (int t = 0; t < n_periods; ++t)
    lp.rows[t].rhs = demand[t] - pmin_committed[t];
}

EdModel build_ed_model(const CaseDefinition& c, const CommitmentSchedule& x,
                       std::span<const double> demand) {
  check_dims(c, x, demand);
  const int G = static_cast<int>(c.generators.size());
  const int T = c.loads.periods();
  const int S = c.n_segments;
  const double M = c.shed_penalty;

  EdModel mdl;
  mdl.n_gens = G;
  mdl.n_periods = T;
  mdl.n_segments = S;
  mdl.plcs.reserve(G);
  for (const auto& g : c.generators) mdl.plcs.push_back(linearize_cost(g, S));

  LinearProgram& lp = mdl.lp;

  // Variables: segment increments above p_min per (g, t), zeroed when off.
  for (int g = 0; g < G; ++g) {
    const auto& plc = mdl.plcs[g];
    for (int t = 0; t < T; ++t) {
      const bool on = x.at(g, t) != 0;
      for (int s = 0; s < S; ++s) {
        const double width = plc.breakpoints[s + 1] - plc.breakpoints[s];
        lp.add_variable(plc.slopes[s], 0.0, on ? width : 0.0);
      }
      if (on) mdl.objective_constant += plc.fixed_cost;
    }
  }
  mdl.q_base = lp.n_vars;
  for (int t = 0; t < T; ++t) lp.add_variable(M, 0.0, kInf);
  mdl.surplus_base = lp.n_vars;
  for (int t = 0; t < T; ++t) lp.add_variable(M, 0.0, kInf);

  // Balance per period: sum_g p[g,t] + q[t] - surplus[t] = D[t], with the
  // committed p_min offsets moved to the right-hand side.
  mdl.pmin_committed.assign(T, 0.0);
  for (int t = 0; t < T; ++t) {
    std::vector<std::pair<int, double>> row;
    row.reserve(static_cast<std::size_t>(G) * S + 2);
    for (int g = 0; g < G; ++g) {
      if (x.at(g, t)) mdl.pmin_committed[t] += c.generators[g].p_min;
      for (int s = 0; s < S; ++s) row.emplace_back(mdl.seg_var(g, t, s), 1.0);
    }
    row.emplace_back(mdl.q_base + t, 1.0);
    row.emplace_back(mdl.surplus_base + t, -1.0);
    lp.add_row(std::move(row), Relation::eq, demand[t] - mdl.pmin_committed[t]);
  }

  // Ramp rows, t = 1 uses the initial state as period 0.
  for (int g = 0; g < G; ++g) {
    const GeneratorUnit& gen = c.generators[g];
    const double pm = gen.p_min;
    for (int t = 0; t < T; ++t) {
      const int x_now = x.at(g, t);
      const int x_prev = t == 0 ? (gen.initial_on ? 1 : 0) : x.at(g, t - 1);
      const double p0 = gen.initial_on ? gen.initial_power : 0.0;
      const double ru = ramp_up_limit(gen, x_prev, x_now);
      const double rd = ramp_down_limit(gen, x_prev, x_now);

      std::vector<std::pair<int, double>> up, down;
      for (int s = 0; s < S; ++s) {
        up.emplace_back(mdl.seg_var(g, t, s), 1.0);
        down.emplace_back(mdl.seg_var(g, t, s), -1.0);
      }
      double up_rhs, down_rhs;
      if (t == 0) {
        up_rhs = ru - pm * x_now + p0;
        down_rhs = rd + pm * x_now - p0;
      } else {
        for (int s = 0; s < S; ++s) {
          up.emplace_back(mdl.seg_var(g, t - 1, s), -1.0);
          down.emplace_back(mdl.seg_var(g, t - 1, s), 1.0);
        }
        up_rhs = ru - pm * (x_now - x_prev);
        down_rhs = rd - pm * (x_prev - x_now);
      }
      lp.add_row(std::move(up), Relation::le, up_rhs);
      lp.add_row(std::move(down), Relation::le, down_rhs);
    }
  }
  return mdl;
}

LinearProgram build_ed_lp(const CaseDefinition& c, const CommitmentSchedule& x,
                          std::span<const double> demand) {
  return build_ed_model(c, x, demand).lp;
}

namespace {

DispatchSolution extract(const EdModel& mdl, const LpSolution& lps) {
  const int G = mdl.n_gens, T = mdl.n_periods, S = mdl.n_segments;
  DispatchSolution d;
  d.p.assign(static_cast<std::size_t>(G) * T, 0.0);
  d.shed.resize(T);
  d.surplus.resize(T);
  double seg_cost = 0.0;
  for (int g = 0; g < G; ++g) {
    const auto& plc = mdl.plcs[g];
    for (int t = 0; t < T; ++t) {
      // increments above p_min; bounds are zero when the unit is off
      double y = 0.0;
      for (int s = 0; s < S; ++s) {
        const double v = lps.x[mdl.seg_var(g, t, s)];
        y += v;
        seg_cost += plc.slopes[s] * v;
      }
      d.p[static_cast<std::size_t>(g) * T + t] = y;
    }
  }
  double penalty = 0.0;
  for (int t = 0; t < T; ++t) {
    d.shed[t] = lps.x[mdl.q_base + t];
    d.surplus[t] = lps.x[mdl.surplus_base + t];
    penalty += d.shed[t] + d.surplus[t];
  }
  d.production_cost = mdl.objective_constant + seg_cost;
  d.penalty_cost = lps.objective_value - seg_cost;
  d.total = lps.objective_value + mdl.objective_constant;
  return d;
}

}  // namespace

DispatchSolution solve_ed(const CaseDefinition& c, const CommitmentSchedule& x,
                          std::span<const double> demand) {
  EdEvaluator ev(c, x);
  return ev.solve(demand);
}

EdEvaluator::EdEvaluator(const CaseDefinition& c, const CommitmentSchedule& x)
    : model_(build_ed_model(c, x, std::vector<double>(c.loads.periods(), 0.0))) {
  // record per-(g,t) commitment flags via p_min offsets for solution mapping
  const int G = model_.n_gens, T = model_.n_periods;
  committed_pmin_.assign(static_cast<std::size_t>(G) * T, 0.0);
  for (int g = 0; g < G; ++g)
    for (int t = 0; t < T; ++t)
      if (x.at(g, t)) committed_pmin_[static_cast<std::size_t>(g) * T + t] = c.generators[g].p_min;
}

double EdEvaluator::evaluate(std::span<const double> demand) const {
  model_.set_demand(demand);
  LpSolution lps = solve_lp(model_.lp);
  if (lps.status != LpStatus::optimal)
    throw std::runtime_error(
        "dispatch LP not solvable (commitment incompatible with ramp limits "
        "and initial conditions)");
  return lps.objective_value + model_.objective_constant;
}

DispatchSolution EdEvaluator::solve(std::span<const double> demand) const {
  model_.set_demand(demand);
  LpSolution lps = solve_lp(model_.lp);
  if (lps.status != LpStatus::optimal)
    throw std::runtime_error(
        "dispatch LP not solvable (commitment incompatible with ramp limits "
        "and initial conditions)");
  DispatchSolution d = extract(model_, lps);
  const int G = model_.n_gens, T = model_.n_periods;
  for (int g = 0; g < G; ++g)
    for (int t = 0; t < T; ++t)
      d.p[static_cast<std::size_t>(g) * T + t] += committed_pmin_[static_cast<std::size_t>(g) * T + t];
  return d;
}

}  // namespace pcd
