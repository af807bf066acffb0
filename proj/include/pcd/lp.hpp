#pragma once

#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pcd {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { le, eq, ge };
enum class LpStatus { optimal, infeasible, unbounded };

struct LpRow {
  std::vector<std::pair<int, double>> coeffs;  // (column, value)
  Relation rel = Relation::le;
  double rhs = 0.0;
};

// Bounded-variable LP: min c'x subject to the rows and lower <= x <= upper.
// Lower bounds must be finite; upper bounds may be +inf.
struct LinearProgram {
  int n_vars = 0;
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<LpRow> rows;

  int add_variable(double cost, double lo, double hi) {
    objective.push_back(cost);
    lower.push_back(lo);
    upper.push_back(hi);
    return n_vars++;
  }
  void add_row(std::vector<std::pair<int, double>> coeffs, Relation rel, double rhs) {
    rows.push_back(LpRow{std::move(coeffs), rel, rhs});
  }
};

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  double objective_value = 0.0;
  int iterations = 0;
};

// Raised when pivots stay below the stability threshold, i.e. the model is
// badly scaled or numerically degenerate beyond repair.
class LpNumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Revised simplex with explicit variable bounds and a dense basis inverse.
// Dantzig pricing with a switch to Bland's rule after a stall; two-phase
// start certifies infeasibility, unbounded rays certify unboundedness.
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace pcd
