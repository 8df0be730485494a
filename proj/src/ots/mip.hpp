#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lp.hpp"

namespace ots {

// Mixed-integer program: an LP plus a set of columns required to take
// integer values.
struct MipProblem {
  LinearProgram lp;
  std::vector<int> integer_vars;
};

enum class MipStatus { Optimal, GapLimit, TimeLimit, Infeasible };

struct MipResult {
  MipStatus status = MipStatus::Infeasible;
  std::vector<double> primal;       // incumbent, empty when none was found
  double objective_value = 0.0;     // incumbent objective
  double best_bound = 0.0;          // global lower bound at termination
  double gap = 0.0;                 // (objective - bound) / max(|objective|, eps)
  long nodes_explored = 0;
  long lp_solves = 0;
  double wall_seconds = 0.0;
};

struct MipOptions {
  double rel_gap = 0.0;             // stop once gap <= rel_gap
  double time_limit_seconds = 0.0;  // 0 means no limit
  double integrality_tol = 1e-6;
  SimplexOptions simplex;
};

// Best-bound branch and bound with most-fractional branching. Deterministic:
// node selection ties break on node id, branch variable ties on the lowest
// column index. warm_start, when given, must satisfy every row, bound, and
// integrality restriction; it seeds the incumbent and is never used to guide
// the search.
MipResult solve_mip(const MipProblem& mip, const MipOptions& opts = {},
                    const std::optional<std::vector<double>>& warm_start = std::nullopt);

}  // namespace ots
