#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace ots {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { LessEqual, GreaterEqual, Equal };

struct LpRow {
  std::vector<std::pair<int, double>> coeffs;  // (column, value), columns unique
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
};

// Minimization problem over bounded variables:
//   min c'x  s.t.  rows,  lower <= x <= upper
struct LinearProgram {
  int num_vars = 0;
  std::vector<double> objective;
  std::vector<double> lower, upper;
  std::vector<LpRow> rows;
  std::vector<std::string> var_names;  // optional; filled on demand for dumps

  int add_variable(double lo, double up, double cost, std::string name = {});
  int add_row(Relation rel, double rhs, std::vector<std::pair<int, double>> coeffs);

  int num_rows() const { return static_cast<int>(rows.size()); }

  // Throws InvalidArgument on structural defects: bad column indexes,
  // duplicate coefficients in a row, crossed or NaN bounds, non-finite
  // coefficients.
  void check_well_formed() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

// Simplex basis: which columns are basic (slack for row i is column
// num_vars + i) and which nonbasic columns rest at their upper bound.
struct Basis {
  std::vector<int> basic;
  std::vector<int> nonbasic_at_upper;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> primal;  // structural variables, size num_vars
  double objective_value = 0.0;
  Basis basis;
  long iterations = 0;
};

struct SimplexOptions {
  double feasibility_tol = 1e-7;
  double pivot_tol = 1e-9;
  // Consecutive degenerate pivots before switching to Bland's rule.
  long degenerate_limit = 1000;
  // 0 means 50 * (rows + columns).
  long iteration_limit = 0;
};

// Bounded-variable two-phase revised simplex. A warm basis is used when it
// is structurally valid and factorizable; otherwise the solve starts cold.
// Throws SolveError when the iteration limit is hit or the basis cannot be
// refactorized.
LpSolution solve_lp(const LinearProgram& lp, const std::optional<Basis>& warm = std::nullopt,
                    const SimplexOptions& opts = {});

// CPLEX LP-format text. Columns listed in integer_vars are declared binary
// or general integer from their bounds.
void write_lp_format(std::ostream& out, const LinearProgram& lp,
                     const std::vector<int>& integer_vars = {});

}  // namespace ots
