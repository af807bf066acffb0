#include "pcd/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

namespace pcd {

namespace {

constexpr double kPivotTol = 1e-11;   // minimum acceptable pivot magnitude
constexpr double kFeasTol = 1e-7;     // feasibility, after row scaling
constexpr double kOptTol = 1e-9;      // reduced-cost optimality
constexpr double kDegenStep = 1e-12;  // step size treated as a stalled pivot

enum VStat : signed char { kAtLower = 0, kAtUpper = 1, kBasic = 2 };

struct Solver {
  int m = 0;       // rows
  int n_struct = 0;
  int ncols = 0;   // structural + slacks + artificials

  // columns in CSR-ish flat form
  std::vector<int> col_ptr;
  std::vector<int> col_row;
  std::vector<double> col_val;

  std::vector<double> lo, hi;
  std::vector<double> phase2_cost;
  std::vector<double> b;  // scaled rhs

  std::vector<int> basis;
  std::vector<signed char> vstat;
  std::vector<double> binv;  // m*m, row-major
  std::vector<double> xB;

  std::vector<double> y, w;

  bool bland = false;
  int stall = 0;
  int pivots_since_refactor = 0;
  int iterations = 0;

  double nb_value(int j) const { return vstat[j] == kAtUpper ? hi[j] : lo[j]; }

  void add_col(const std::vector<std::pair<int, double>>& entries, double l, double h,
               double cost) {
    for (const auto& [r, v] : entries) {
      col_row.push_back(r);
      col_val.push_back(v);
    }
    col_ptr.push_back(static_cast<int>(col_row.size()));
    lo.push_back(l);
    hi.push_back(h);
    phase2_cost.push_back(cost);
    ++ncols;
  }

  // Rebuilds binv from the basis columns by Gauss-Jordan with partial
  // pivoting. Returns false on a (near-)singular basis.
  bool refactor() {
    std::vector<double> B(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) {
      const int j = basis[i];
      for (int p = col_ptr[j]; p < col_ptr[j + 1]; ++p)
        B[static_cast<std::size_t>(col_row[p]) * m + i] = col_val[p];
    }
    std::vector<double>& inv = binv;
    std::fill(inv.begin(), inv.end(), 0.0);
    for (int i = 0; i < m; ++i) inv[static_cast<std::size_t>(i) * m + i] = 1.0;

    for (int c = 0; c < m; ++c) {
      int piv = c;
      double best = std::abs(B[static_cast<std::size_t>(c) * m + c]);
      for (int r = c + 1; r < m; ++r) {
        const double a = std::abs(B[static_cast<std::size_t>(r) * m + c]);
        if (a > best) {
          best = a;
          piv = r;
        }
      }
      if (best < kPivotTol) return false;
      if (piv != c) {
        for (int k = 0; k < m; ++k) {
          std::swap(B[static_cast<std::size_t>(piv) * m + k], B[static_cast<std::size_t>(c) * m + k]);
          std::swap(inv[static_cast<std::size_t>(piv) * m + k],
                    inv[static_cast<std::size_t>(c) * m + k]);
        }
      }
      const double d = 1.0 / B[static_cast<std::size_t>(c) * m + c];
      for (int k = 0; k < m; ++k) {
        B[static_cast<std::size_t>(c) * m + k] *= d;
        inv[static_cast<std::size_t>(c) * m + k] *= d;
      }
      for (int r = 0; r < m; ++r) {
        if (r == c) continue;
        const double f = B[static_cast<std::size_t>(r) * m + c];
        if (f == 0.0) continue;
        for (int k = 0; k < m; ++k) {
          B[static_cast<std::size_t>(r) * m + k] -= f * B[static_cast<std::size_t>(c) * m + k];
          inv[static_cast<std::size_t>(r) * m + k] -= f * inv[static_cast<std::size_t>(c) * m + k];
        }
      }
    }
    pivots_since_refactor = 0;
    return true;
  }

  void compute_xB() {
    std::vector<double> r = b;
    for (int j = 0; j < ncols; ++j) {
      if (vstat[j] == kBasic) continue;
      const double v = nb_value(j);
      if (v == 0.0) continue;
      for (int p = col_ptr[j]; p < col_ptr[j + 1]; ++p) r[col_row[p]] -= col_val[p] * v;
    }
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      const double* row = &binv[static_cast<std::size_t>(i) * m];
      for (int k = 0; k < m; ++k) s += row[k] * r[k];
      xB[i] = s;
    }
  }

  void ftran(int j, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int p = col_ptr[j]; p < col_ptr[j + 1]; ++p) {
      const int r = col_row[p];
      const double v = col_val[p];
      for (int i = 0; i < m; ++i) out[i] += binv[static_cast<std::size_t>(i) * m + r] * v;
    }
  }

  // One simplex phase with the given cost vector. Returns the terminal
  // status for this phase: optimal or unbounded.
  LpStatus run_phase(const std::vector<double>& cost, int max_iter) {
    int bad_pivots = 0;
    while (true) {
      if (++iterations > max_iter)
        throw LpNumericalError("simplex iteration limit exceeded");

      // y = c_B' * binv
      std::fill(y.begin(), y.end(), 0.0);
      for (int i = 0; i < m; ++i) {
        const double cb = cost[basis[i]];
        if (cb == 0.0) continue;
        const double* row = &binv[static_cast<std::size_t>(i) * m];
        for (int k = 0; k < m; ++k) y[k] += cb * row[k];
      }

      // pricing
      int q = -1;
      double best_viol = kOptTol;
      for (int j = 0; j < ncols; ++j) {
        if (vstat[j] == kBasic || lo[j] == hi[j]) continue;
        double d = cost[j];
        for (int p = col_ptr[j]; p < col_ptr[j + 1]; ++p) d -= y[col_row[p]] * col_val[p];
        const double viol = vstat[j] == kAtLower ? -d : d;
        if (viol > best_viol) {
          best_viol = viol;
          q = j;
          if (bland) break;  // first eligible index
        }
      }
      if (q < 0) return LpStatus::optimal;

      const double dir = vstat[q] == kAtLower ? 1.0 : -1.0;
      ftran(q, w);

      // ratio test
      double step = hi[q] - lo[q];  // own-bound flip distance (may be inf)
      int leave_row = -1;
      bool leave_to_upper = false;
      double leave_alpha = 0.0;
      for (int i = 0; i < m; ++i) {
        const double alpha = dir * w[i];
        const int k = basis[i];
        double ratio;
        bool to_upper;
        if (alpha > kPivotTol) {
          if (lo[k] == -kInf) continue;
          ratio = (xB[i] - lo[k]) / alpha;
          to_upper = false;
        } else if (alpha < -kPivotTol) {
          if (hi[k] == kInf) continue;
          ratio = (xB[i] - hi[k]) / alpha;
          to_upper = true;
        } else {
          continue;
        }
        if (ratio < 0.0) ratio = 0.0;  // drift from degeneracy
        bool take = false;
        if (leave_row < 0) {
          take = ratio < step;  // step may be +inf here (own-bound distance)
        } else {
          const double tie = 1e-9 * (1.0 + step);
          if (ratio < step - tie)
            take = true;
          else if (ratio <= step + tie)
            take = bland ? basis[i] < basis[leave_row]
                         : std::abs(alpha) > std::abs(leave_alpha);
        }
        if (take) {
          step = ratio;
          leave_row = i;
          leave_to_upper = to_upper;
          leave_alpha = alpha;
        }
      }

      if (leave_row < 0) {
        if (step == kInf) return LpStatus::unbounded;  // improving ray
        // bound flip: q moves to its opposite bound, basis stays
        for (int i = 0; i < m; ++i) xB[i] -= dir * step * w[i];
        vstat[q] = vstat[q] == kAtLower ? kAtUpper : kAtLower;
        stall = step <= kDegenStep ? stall + 1 : 0;
      } else {
        const double pe = w[leave_row];
        if (std::abs(pe) < kPivotTol) {
          if (++bad_pivots > 3 || !refactor())
            throw LpNumericalError("pivot magnitude below 1e-11; model is badly scaled");
          compute_xB();
          continue;
        }
        const double enter_val = nb_value(q) + dir * step;
        const int k = basis[leave_row];
        for (int i = 0; i < m; ++i)
          if (i != leave_row) xB[i] -= dir * step * w[i];
        xB[leave_row] = enter_val;
        basis[leave_row] = q;
        vstat[q] = kBasic;
        vstat[k] = leave_to_upper ? kAtUpper : kAtLower;

        // eta update of binv
        double* prow = &binv[static_cast<std::size_t>(leave_row) * m];
        const double inv_pe = 1.0 / pe;
        for (int c = 0; c < m; ++c) prow[c] *= inv_pe;
        for (int i = 0; i < m; ++i) {
          if (i == leave_row) continue;
          const double f = w[i];
          if (f == 0.0) continue;
          double* row = &binv[static_cast<std::size_t>(i) * m];
          for (int c = 0; c < m; ++c) row[c] -= f * prow[c];
        }
        if (++pivots_since_refactor >= 100) {
          if (!refactor())
            throw LpNumericalError("basis refactorization failed; model is badly scaled");
          compute_xB();
        }
        stall = step <= kDegenStep ? stall + 1 : 0;
      }
      if (!bland && stall > 2 * (m + ncols)) bland = true;
    }
  }
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  const int n = lp.n_vars;
  if (static_cast<int>(lp.objective.size()) != n || static_cast<int>(lp.lower.size()) != n ||
      static_cast<int>(lp.upper.size()) != n)
    throw std::invalid_argument("LinearProgram vectors must have n_vars entries");
  for (int j = 0; j < n; ++j) {
    if (!(lp.lower[j] > -kInf)) throw std::invalid_argument("lower bounds must be finite");
    if (lp.lower[j] > lp.upper[j]) throw std::invalid_argument("lower > upper for a variable");
  }

  // Assemble scaled rows, dropping empty ones (checking them directly).
  struct ScaledRow {
    std::vector<std::pair<int, double>> coeffs;
    Relation rel;
    double rhs;
  };
  std::vector<ScaledRow> srows;
  for (const auto& row : lp.rows) {
    std::vector<double> dense(n, 0.0);
    for (const auto& [j, v] : row.coeffs) {
      if (j < 0 || j >= n) throw std::invalid_argument("constraint column out of range");
      dense[j] += v;
    }
    ScaledRow sr;
    double scale = 0.0;
    for (int j = 0; j < n; ++j)
      if (dense[j] != 0.0) scale = std::max(scale, std::abs(dense[j]));
    if (scale == 0.0) {
      const double r = row.rhs;
      const bool ok = (row.rel == Relation::le && 0.0 <= r + kFeasTol) ||
                      (row.rel == Relation::ge && 0.0 >= r - kFeasTol) ||
                      (row.rel == Relation::eq && std::abs(r) <= kFeasTol);
      if (!ok) return LpSolution{LpStatus::infeasible, {}, 0.0, 0};
      continue;
    }
    for (int j = 0; j < n; ++j)
      if (dense[j] != 0.0) sr.coeffs.emplace_back(j, dense[j] / scale);
    sr.rel = row.rel;
    sr.rhs = row.rhs / scale;
    srows.push_back(std::move(sr));
  }

  const int m = static_cast<int>(srows.size());

  if (m == 0) {
    // Pure bound problem: each variable sits at its cheaper bound.
    LpSolution sol;
    sol.status = LpStatus::optimal;
    sol.x.resize(n);
    double obj = 0.0;
    for (int j = 0; j < n; ++j) {
      if (lp.objective[j] < 0.0) {
        if (lp.upper[j] == kInf) return LpSolution{LpStatus::unbounded, {}, 0.0, 0};
        sol.x[j] = lp.upper[j];
      } else {
        sol.x[j] = lp.lower[j];
      }
      obj += lp.objective[j] * sol.x[j];
    }
    sol.objective_value = obj;
    return sol;
  }

  Solver s;
  s.m = m;
  s.n_struct = n;
  s.col_ptr.push_back(0);

  // structural columns (gather row entries per column)
  {
    std::vector<std::vector<std::pair<int, double>>> cols(n);
    for (int i = 0; i < m; ++i)
      for (const auto& [j, v] : srows[i].coeffs) cols[j].emplace_back(i, v);
    for (int j = 0; j < n; ++j) s.add_col(cols[j], lp.lower[j], lp.upper[j], lp.objective[j]);
  }
  // slack columns: row + slack = rhs
  for (int i = 0; i < m; ++i) {
    double l = 0.0, h = 0.0;
    switch (srows[i].rel) {
      case Relation::le: l = 0.0; h = kInf; break;
      case Relation::ge: l = -kInf; h = 0.0; break;
      case Relation::eq: l = 0.0; h = 0.0; break;
    }
    s.add_col({{i, 1.0}}, l, h, 0.0);
  }

  s.b.resize(m);
  for (int i = 0; i < m; ++i) s.b[i] = srows[i].rhs;

  // start: every structural/slack variable at its finite bound nearest zero
  s.vstat.assign(s.ncols, kAtLower);
  for (int j = 0; j < s.ncols; ++j) {
    if (s.lo[j] == -kInf)
      s.vstat[j] = kAtUpper;
    else if (s.hi[j] != kInf && std::abs(s.hi[j]) < std::abs(s.lo[j]))
      s.vstat[j] = kAtUpper;
  }

  // crash basis: slack basic wherever its bounds absorb the residual,
  // artificial only on the violated rows
  std::vector<double> residual = s.b;
  for (int j = 0; j < n; ++j) {
    const double v = s.nb_value(j);
    if (v == 0.0) continue;
    for (int p = s.col_ptr[j]; p < s.col_ptr[j + 1]; ++p)
      residual[s.col_row[p]] -= s.col_val[p] * v;
  }
  const int art_base = s.ncols;
  s.basis.resize(m);
  s.binv.assign(static_cast<std::size_t>(m) * m, 0.0);
  s.xB.resize(m);
  s.y.resize(m);
  s.w.resize(m);
  std::vector<double> phase1_cost(s.ncols, 0.0);
  int n_artificial = 0;
  for (int i = 0; i < m; ++i) {
    const int slack = n + i;
    if (residual[i] >= s.lo[slack] - 1e-12 && residual[i] <= s.hi[slack] + 1e-12) {
      s.basis[i] = slack;
      s.vstat[slack] = kBasic;
      s.binv[static_cast<std::size_t>(i) * m + i] = 1.0;
      s.xB[i] = residual[i];
    } else {
      const double sigma = residual[i] >= 0.0 ? 1.0 : -1.0;
      const int art = s.ncols;
      s.add_col({{i, sigma}}, 0.0, kInf, 0.0);
      phase1_cost.push_back(1.0);
      s.basis[i] = art;
      s.vstat.push_back(kBasic);
      s.binv[static_cast<std::size_t>(i) * m + i] = sigma;
      s.xB[i] = std::abs(residual[i]);
      ++n_artificial;
    }
  }

  const int max_iter = 200 * (m + s.ncols) + 10000;

  double bscale = 1.0;
  for (int i = 0; i < m; ++i) bscale = std::max(bscale, std::abs(s.b[i]));

  // phase 1 (skipped when the crash basis is already feasible)
  if (n_artificial > 0) {
    if (s.run_phase(phase1_cost, max_iter) == LpStatus::unbounded)
      throw LpNumericalError("phase-1 objective reported unbounded; model is badly scaled");
    double infeas = 0.0;
    for (int i = 0; i < m; ++i)
      if (s.basis[i] >= art_base) infeas += std::max(0.0, s.xB[i]);
    if (infeas > kFeasTol * bscale)
      return LpSolution{LpStatus::infeasible, {}, 0.0, s.iterations};
  }

  // drive remaining artificials out of the basis where possible
  for (int i = 0; i < m; ++i) {
    if (s.basis[i] < art_base) continue;
    int enter = -1;
    for (int j = 0; j < art_base; ++j) {
      if (s.vstat[j] == kBasic) continue;
      double wi = 0.0;
      for (int p = s.col_ptr[j]; p < s.col_ptr[j + 1]; ++p)
        wi += s.binv[static_cast<std::size_t>(i) * m + s.col_row[p]] * s.col_val[p];
      if (std::abs(wi) > 1e-8) {
        enter = j;
        break;
      }
    }
    if (enter < 0) continue;  // redundant row; artificial stays pinned at 0
    s.ftran(enter, s.w);
    const int k = s.basis[i];
    const double pe = s.w[i];
    s.basis[i] = enter;
    s.vstat[enter] = kBasic;
    s.vstat[k] = kAtLower;
    double* prow = &s.binv[static_cast<std::size_t>(i) * m];
    const double inv_pe = 1.0 / pe;
    for (int c = 0; c < m; ++c) prow[c] *= inv_pe;
    for (int r = 0; r < m; ++r) {
      if (r == i) continue;
      const double f = s.w[r];
      if (f == 0.0) continue;
      double* row = &s.binv[static_cast<std::size_t>(r) * m];
      for (int c = 0; c < m; ++c) row[c] -= f * prow[c];
    }
    s.compute_xB();
  }
  // pin all artificials at zero so they never re-enter
  for (int j = art_base; j < s.ncols; ++j) {
    s.lo[j] = 0.0;
    s.hi[j] = 0.0;
  }

  // phase 2
  std::vector<double> phase2 = s.phase2_cost;
  s.bland = false;
  s.stall = 0;
  const LpStatus status = s.run_phase(phase2, max_iter);
  if (status == LpStatus::unbounded)
    return LpSolution{LpStatus::unbounded, {}, 0.0, s.iterations};

  LpSolution sol;
  sol.status = LpStatus::optimal;
  sol.iterations = s.iterations;
  sol.x.assign(n, 0.0);
  for (int j = 0; j < n; ++j) sol.x[j] = s.nb_value(j);
  for (int i = 0; i < m; ++i)
    if (s.basis[i] < n) sol.x[s.basis[i]] = s.xB[i];
  // clamp roundoff drift into the box
  for (int j = 0; j < n; ++j) sol.x[j] = std::clamp(sol.x[j], lp.lower[j], lp.upper[j]);
  double obj = 0.0;
  for (int j = 0; j < n; ++j) obj += lp.objective[j] * sol.x[j];
  sol.objective_value = obj;
  return sol;
}

}  // namespace pcd
