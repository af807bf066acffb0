#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pcd/lp.hpp"

using namespace pcd;

TEST_CASE("single variable against a constraint row") {
  LinearProgram lp;
  int x = lp.add_variable(1.0, 0.0, 10.0);
  lp.add_row({{x, 1.0}}, Relation::ge, 3.0);
  LpSolution s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.x[0] == doctest::Approx(3.0));
  CHECK(s.objective_value == doctest::Approx(3.0));
}

TEST_CASE("simplex on a triangle") {
  LinearProgram lp;
  int x = lp.add_variable(-1.0, 0.0, 1.0);
  int y = lp.add_variable(-1.0, 0.0, 1.0);
  lp.add_row({{x, 1.0}, {y, 1.0}}, Relation::le, 1.0);
  LpSolution s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.objective_value == doctest::Approx(-1.0));
  CHECK(s.x[0] + s.x[1] == doctest::Approx(1.0));
}

TEST_CASE("contradictory constraints are certified infeasible") {
  LinearProgram lp;
  int x = lp.add_variable(0.0, 0.0, 10.0);
  lp.add_row({{x, 1.0}}, Relation::ge, 2.0);
  lp.add_row({{x, 1.0}}, Relation::le, 1.0);
  CHECK(solve_lp(lp).status == LpStatus::infeasible);
}

TEST_CASE("unbounded ray is detected") {
  LinearProgram lp;
  int x = lp.add_variable(-1.0, 0.0, kInf);
  int y = lp.add_variable(0.0, 0.0, 5.0);
  lp.add_row({{x, 1.0}, {y, -1.0}}, Relation::ge, 0.0);
  CHECK(solve_lp(lp).status == LpStatus::unbounded);
}

TEST_CASE("equality rows and upper bounds interact correctly") {
  // min 2a + b st a + b = 4, b <= 3 -> a = 1, b = 3, objective 5
  LinearProgram lp;
  int a = lp.add_variable(2.0, 0.0, kInf);
  int b = lp.add_variable(1.0, 0.0, 3.0);
  lp.add_row({{a, 1.0}, {b, 1.0}}, Relation::eq, 4.0);
  LpSolution s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.objective_value == doctest::Approx(5.0));
  CHECK(s.x[0] == doctest::Approx(1.0));
  CHECK(s.x[1] == doctest::Approx(3.0));
}

TEST_CASE("random small LPs match vertex enumeration") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> nv(1, 6), nc(1, 6), rel(0, 2);

  int optimal_seen = 0;
  for (int trial = 0; trial < 120; ++trial) {
    LinearProgram lp;
    const int n = nv(rng);
    for (int j = 0; j < n; ++j) {
      const double lo = -5.0 + 4.0 * u(rng);
      lp.add_variable(std::round(10.0 * u(rng)) / 2.0, lo, lo + 5.0 + 4.0 * std::abs(u(rng)));
    }
    const int m = nc(rng);
    for (int i = 0; i < m; ++i) {
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < n; ++j) {
        const double v = std::round(8.0 * u(rng)) / 4.0;
        if (v != 0.0) row.emplace_back(j, v);
      }
      if (row.empty()) row.emplace_back(0, 1.0);
      lp.add_row(std::move(row), static_cast<Relation>(rel(rng)), std::round(12.0 * u(rng)) / 2.0);
    }

    LpSolution got = solve_lp(lp);
    auto expect = oracles::vertex_enumeration_optimum(lp);
    if (!expect.has_value()) {
      CHECK(got.status == LpStatus::infeasible);
      continue;
    }
    REQUIRE(got.status == LpStatus::optimal);
    ++optimal_seen;
    CHECK(got.objective_value ==
          doctest::Approx(*expect).epsilon(1e-8).scale(std::max(1.0, std::abs(*expect))));

    // returned point satisfies every constraint within the feasibility tolerance
    for (int j = 0; j < n; ++j) {
      CHECK(got.x[j] >= lp.lower[j] - 1e-7);
      CHECK(got.x[j] <= lp.upper[j] + 1e-7);
    }
    for (const auto& row : lp.rows) {
      double lhs = 0.0;
      double scale = 0.0;
      for (const auto& [j, v] : row.coeffs) {
        lhs += v * got.x[j];
        scale = std::max(scale, std::abs(v));
      }
      const double tol = 1e-7 * std::max(1.0, scale);
      switch (row.rel) {
        case Relation::le: CHECK(lhs <= row.rhs + tol); break;
        case Relation::ge: CHECK(lhs >= row.rhs - tol); break;
        case Relation::eq: CHECK(std::abs(lhs - row.rhs) <= tol); break;
      }
    }
  }
  CHECK(optimal_seen > 40);  // the generator must actually exercise the solver
}

TEST_CASE("identical inputs give identical outputs") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  LinearProgram lp;
  for (int j = 0; j < 8; ++j) lp.add_variable(u(rng), 0.0, 2.0 + std::abs(u(rng)));
  for (int i = 0; i < 6; ++i) {
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < 8; ++j) row.emplace_back(j, u(rng));
    lp.add_row(std::move(row), i % 2 ? Relation::le : Relation::ge, u(rng));
  }
  LpSolution a = solve_lp(lp);
  LpSolution b = solve_lp(lp);
  REQUIRE(a.status == b.status);
  CHECK(a.objective_value == b.objective_value);  // bit-identical
  CHECK(a.x == b.x);
  CHECK(a.iterations == b.iterations);
}
