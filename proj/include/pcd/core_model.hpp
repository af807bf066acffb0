#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace pcd {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A thermal generating unit. Ramp rates are MW per period, costs follow the
// quadratic production model a + b*p + c*p^2 with `a` paid only while
// committed.
struct GeneratorUnit {
  std::string id;
  double p_min = 0.0;
  double p_max = 0.0;
  double ramp_up = 0.0;        // R^u
  double ramp_down = 0.0;      // R^d
  double startup_ramp = 0.0;   // S^u
  double shutdown_ramp = 0.0;  // S^d
  double cost_a = 0.0;         // $/period while on
  double cost_b = 0.0;         // $/MWh
  double cost_c = 0.0;         // $/MW^2h, >= 0
  double startup_cost = 0.0;
  double shutdown_cost = 0.0;
  int min_up = 1;
  int min_down = 1;
  bool initial_on = false;
  double initial_power = 0.0;
  int initial_state_duration = 1;  // periods already spent in the initial state

  // Marginal cost at maximum output, b + 2*c*p_max.
  double max_marginal_cost() const { return cost_b + 2.0 * cost_c * p_max; }
};

// Per-period demand range [d_min, d_max] with the nominal forecast inside it.
struct LoadBox {
  std::vector<double> nominal;
  std::vector<double> d_min;
  std::vector<double> d_max;

  int periods() const { return static_cast<int>(nominal.size()); }
  bool degenerate() const;  // true when d_min == d_max in every period
};

struct CaseDefinition {
  std::vector<GeneratorUnit> generators;
  LoadBox loads;
  double shed_penalty = 1.0e4;  // $/MWh for unserved or surplus energy
  int n_segments = 10;          // piecewise segments per generator

  std::uint64_t hash() const;  // content hash over all fields
};

// Piecewise-linear production cost: fixed_cost is charged while committed,
// each segment i adds slopes[i] per MW between breakpoints[i] and
// breakpoints[i+1].
struct PiecewiseLinearCost {
  double fixed_cost = 0.0;
  std::vector<double> breakpoints;  // strictly increasing, p_min .. p_max
  std::vector<double> slopes;       // nondecreasing, one per segment
};

// Throws ValidationError naming the first violated invariant.
void validate_case(const CaseDefinition& c);

CaseDefinition case_from_json(const nlohmann::json& j, const std::string& base_dir = "");
nlohmann::json case_to_json(const CaseDefinition& c);

// Reads and validates a case file (JSON; load series may reference a CSV).
CaseDefinition load_case(const std::string& path);

// Equal-width breakpoints on [p_min, p_max]; segment slopes are secants of
// b*p + c*p^2, so they are nondecreasing whenever c >= 0. The fixed cost is
// the full production cost at p_min.
PiecewiseLinearCost linearize_cost(const GeneratorUnit& g, int n_segments);

// Cost of output p under the piecewise model; 0 when not committed.
double evaluate_cost(const PiecewiseLinearCost& plc, double p, bool committed);

}  // namespace pcd
