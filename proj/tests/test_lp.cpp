#include <cmath>
#include <sstream>

#include "doctest.h"
#include "lp_oracle.hpp"
#include "ots/lp.hpp"
#include "random_lps.hpp"
#include "tableau_simplex.hpp"

using namespace ots;

TEST_CASE("two variable problem lands on the expected vertex") {
  // min -x - 2y, x + y <= 3, x <= 2, y <= 2. Optimum at (1, 2), value -5.
  LinearProgram lp;
  int x = lp.add_variable(0.0, 2.0, -1.0);
  int y = lp.add_variable(0.0, 2.0, -2.0);
  lp.add_row(Relation::LessEqual, 3.0, {{x, 1.0}, {y, 1.0}});

  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(-5.0));
  CHECK(sol.primal[x] == doctest::Approx(1.0));
  CHECK(sol.primal[y] == doctest::Approx(2.0));
}

TEST_CASE("problems without rows are decided by bounds alone") {
  LinearProgram lp;
  lp.add_variable(-5.0, kInf, 1.0);
  lp.add_variable(-kInf, 7.0, -2.0);
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(-19.0));
  CHECK(sol.primal[0] == -5.0);
  CHECK(sol.primal[1] == 7.0);
}

TEST_CASE("equality and sign constraints mix") {
  // min 2x + 3y, x + y = 1, x - y >= 0, both in [0, 10]. Optimum (1, 0).
  LinearProgram lp;
  int x = lp.add_variable(0.0, 10.0, 2.0);
  int y = lp.add_variable(0.0, 10.0, 3.0);
  lp.add_row(Relation::Equal, 1.0, {{x, 1.0}, {y, 1.0}});
  lp.add_row(Relation::GreaterEqual, 0.0, {{x, 1.0}, {y, -1.0}});

  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(2.0));
  // Cheaper to put everything on x.
  CHECK(sol.primal[x] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sol.primal[y] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("free variables pass through equalities") {
  // min x with theta free and x = 2*theta + 1, x in [0, 4], theta in [-10, 10].
  LinearProgram lp;
  int x = lp.add_variable(0.0, 4.0, 1.0);
  int th = lp.add_variable(-10.0, 10.0, 0.0);
  lp.add_row(Relation::Equal, 1.0, {{x, 1.0}, {th, -2.0}});
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(0.0));
  CHECK(sol.primal[th] == doctest::Approx(-0.5));
}

TEST_CASE("contradictory rows are infeasible") {
  LinearProgram lp;
  int x = lp.add_variable(0.0, 10.0, 1.0);
  int y = lp.add_variable(0.0, 10.0, 1.0);
  lp.add_row(Relation::LessEqual, -1.0, {{x, 1.0}, {y, 1.0}});
  CHECK(solve_lp(lp).status == LpStatus::Infeasible);
}

TEST_CASE("missing bound in the objective direction is unbounded") {
  LinearProgram lp;
  int x = lp.add_variable(0.0, kInf, -1.0);
  lp.add_row(Relation::GreaterEqual, 1.0, {{x, 1.0}});
  CHECK(solve_lp(lp).status == LpStatus::Unbounded);
}

TEST_CASE("fixed variables act as constants") {
  LinearProgram lp;
  int x = lp.add_variable(3.0, 3.0, 2.0);
  int y = lp.add_variable(0.0, 10.0, 1.0);
  lp.add_row(Relation::GreaterEqual, 5.0, {{x, 1.0}, {y, 1.0}});
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.primal[x] == 3.0);
  CHECK(sol.primal[y] == doctest::Approx(2.0));
  CHECK(sol.objective_value == doctest::Approx(8.0));
}

TEST_CASE("structural defects are rejected up front") {
  LinearProgram lp;
  int x = lp.add_variable(0.0, 1.0, 1.0);
  SUBCASE("duplicate column in a row") {
    lp.add_row(Relation::LessEqual, 1.0, {{x, 1.0}, {x, 2.0}});
    CHECK_THROWS_AS(solve_lp(lp), InvalidArgument);
  }
  SUBCASE("column out of range") {
    lp.add_row(Relation::LessEqual, 1.0, {{5, 1.0}});
    CHECK_THROWS_AS(solve_lp(lp), InvalidArgument);
  }
  SUBCASE("crossed bounds") {
    lp.lower[x] = 2.0;
    CHECK_THROWS_AS(solve_lp(lp), InvalidArgument);
  }
}

TEST_CASE("iteration limit raises a solver error") {
  LinearProgram lp;
  for (int j = 0; j < 6; ++j) lp.add_variable(0.0, 10.0, -1.0 - j);
  for (int i = 0; i < 4; ++i) {
    std::vector<std::pair<int, double>> coeffs;
    for (int j = 0; j < 6; ++j) coeffs.emplace_back(j, 1.0 + (i * 7 + j) % 3);
    lp.add_row(Relation::LessEqual, 10.0 + i, std::move(coeffs));
  }
  SimplexOptions opts;
  opts.iteration_limit = 1;
  CHECK_THROWS_AS(solve_lp(lp, std::nullopt, opts), SolveError);
}

TEST_CASE("warm started resolve stops immediately at the optimum") {
  LinearProgram lp;
  int x = lp.add_variable(0.0, 2.0, -1.0);
  int y = lp.add_variable(0.0, 2.0, -2.0);
  lp.add_row(Relation::LessEqual, 3.0, {{x, 1.0}, {y, 1.0}});
  LpSolution first = solve_lp(lp);
  REQUIRE(first.status == LpStatus::Optimal);

  LpSolution again = solve_lp(lp, first.basis);
  CHECK(again.status == LpStatus::Optimal);
  CHECK(again.objective_value == first.objective_value);
  CHECK(again.iterations <= 1);
}

TEST_CASE("garbage warm bases fall back to a cold start") {
  LinearProgram lp;
  int x = lp.add_variable(0.0, 2.0, -1.0);
  lp.add_row(Relation::LessEqual, 3.0, {{x, 1.0}});

  Basis junk;
  junk.basic = {42};  // out of range
  LpSolution sol = solve_lp(lp, junk);
  CHECK(sol.status == LpStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(-2.0));

  Basis dupes;
  dupes.basic = {0};
  dupes.nonbasic_at_upper = {0};
  CHECK(solve_lp(lp, dupes).status == LpStatus::Optimal);
}

TEST_CASE("random problems match the enumeration oracle") {
  constexpr std::uint64_t kSeed = 20260815;
  int checked = 0;
  for (int i = 0; i < 60; ++i) {
    LinearProgram lp = testsupport::random_lp(kSeed, i);
    LpSolution sol = solve_lp(lp);
    testsupport::OracleResult oracle = testsupport::enumerate_optimum(lp);

    INFO("instance ", i);
    REQUIRE(oracle.feasible);
    REQUIRE(sol.status == LpStatus::Optimal);
    double scale = std::max(1.0, std::abs(oracle.objective));
    CHECK(std::abs(sol.objective_value - oracle.objective) <= 1e-6 * scale);

    // Primal invariants: inside bounds and rows, objective consistent.
    double recomputed = 0.0;
    for (int j = 0; j < lp.num_vars; ++j) {
      CHECK(sol.primal[j] >= lp.lower[j] - 1e-7);
      CHECK(sol.primal[j] <= lp.upper[j] + 1e-7);
      recomputed += lp.objective[j] * sol.primal[j];
    }
    CHECK(recomputed == doctest::Approx(sol.objective_value).epsilon(1e-9));
    for (const auto& row : lp.rows) {
      double act = 0.0;
      for (auto [j, v] : row.coeffs) act += v * sol.primal[j];
      double tol = 1e-7 * std::max(1.0, std::abs(row.rhs));
      if (row.relation == Relation::LessEqual) CHECK(act <= row.rhs + tol);
      if (row.relation == Relation::GreaterEqual) CHECK(act >= row.rhs - tol);
      if (row.relation == Relation::Equal) CHECK(act == doctest::Approx(row.rhs).epsilon(1e-6));
    }
    ++checked;
  }
  CHECK(checked == 60);
}

TEST_CASE("random problems agree with the tableau reference solver") {
  constexpr std::uint64_t kSeed = 414243;
  for (int i = 0; i < 25; ++i) {
    LinearProgram lp = testsupport::random_lp(kSeed, i);
    LpSolution sol = solve_lp(lp);
    testsupport::DenseResult ref = testsupport::tableau_solve(testsupport::to_dense(lp));

    INFO("instance ", i);
    REQUIRE(sol.status == LpStatus::Optimal);
    REQUIRE(ref.status == testsupport::DenseResult::kOptimal);
    double scale = std::max(1.0, std::abs(ref.objective));
    CHECK(std::abs(sol.objective_value - ref.objective) <= 1e-6 * scale);
  }
}

TEST_CASE("random infeasible problems are reported as such everywhere") {
  constexpr std::uint64_t kSeed = 777;
  for (int i = 0; i < 15; ++i) {
    LinearProgram lp = testsupport::random_lp(kSeed, i, /*make_infeasible=*/true);
    INFO("instance ", i);
    CHECK(solve_lp(lp).status == LpStatus::Infeasible);
    CHECK_FALSE(testsupport::enumerate_optimum(lp).feasible);
    CHECK(testsupport::tableau_solve(testsupport::to_dense(lp)).status ==
          testsupport::DenseResult::kInfeasible);
  }
}

TEST_CASE("warm starts reproduce cold objectives on random problems") {
  constexpr std::uint64_t kSeed = 9091;
  for (int i = 0; i < 20; ++i) {
    LinearProgram lp = testsupport::random_lp(kSeed, i);
    LpSolution cold = solve_lp(lp);
    REQUIRE(cold.status == LpStatus::Optimal);
    LpSolution warm = solve_lp(lp, cold.basis);
    INFO("instance ", i);
    CHECK(warm.status == LpStatus::Optimal);
    CHECK(warm.objective_value == doctest::Approx(cold.objective_value).epsilon(1e-9));
    CHECK(warm.iterations <= 1);
  }
}

TEST_CASE("lp format dump is stable and complete") {
  LinearProgram lp;
  int x = lp.add_variable(0.0, 1.0, 1.0, "x");
  int y = lp.add_variable(-kInf, kInf, -2.5, "y");
  int z = lp.add_variable(2.0, 2.0, 0.0, "z");
  int w = lp.add_variable(-3.0, 7.0, 0.0, "w");
  lp.add_row(Relation::LessEqual, 4.0, {{x, 1.0}, {y, 2.0}});
  lp.add_row(Relation::GreaterEqual, -1.0, {{y, -1.0}, {z, 1.0}});
  lp.add_row(Relation::Equal, 0.5, {{x, 1.0}, {w, -0.25}});

  std::ostringstream out;
  write_lp_format(out, lp, {x});
  std::string text = out.str();

  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("Subject To") != std::string::npos);
  CHECK(text.find("Bounds") != std::string::npos);
  CHECK((text.find("Binaries") != std::string::npos ||
         text.find("Binary") != std::string::npos));
  CHECK(text.find("End") != std::string::npos);
  CHECK(text.find("y free") != std::string::npos);
  CHECK(text.find("z = 2") != std::string::npos);
  CHECK(text.find("c0:") != std::string::npos);
  CHECK(text.find("c2:") != std::string::npos);

  // Dumping twice gives identical bytes.
  std::ostringstream again;
  write_lp_format(again, lp, {x});
  CHECK(again.str() == text);
}
