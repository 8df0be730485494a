#include "mip.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

namespace ots {

namespace {

struct BoundFix {
  int col;
  double lo, hi;
};

struct Node {
  double bound;
  long id;
  std::vector<BoundFix> fixes;  // tightenings relative to the root problem
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

double relative_gap_of(double objective, double bound) {
  return (objective - bound) / std::max(std::abs(objective), 1e-10);
}

void verify_warm_start(const MipProblem& mip, const std::vector<double>& x, double tol_int) {
  const LinearProgram& lp = mip.lp;
  if (static_cast<int>(x.size()) != lp.num_vars)
    throw InvalidArgument("warm start has the wrong length");
  for (int j = 0; j < lp.num_vars; ++j) {
    double scale = std::max(1.0, std::abs(x[j]));
    if (x[j] < lp.lower[j] - 1e-6 * scale || x[j] > lp.upper[j] + 1e-6 * scale)
      throw InvalidArgument("warm start violates the bounds of column " + std::to_string(j));
  }
  for (int i = 0; i < lp.num_rows(); ++i) {
    const LpRow& r = lp.rows[i];
    double a = 0.0;
    for (auto [j, c] : r.coeffs) a += c * x[j];
    double scale = std::max(1.0, std::abs(r.rhs));
    bool ok = true;
    switch (r.relation) {
      case Relation::LessEqual: ok = a <= r.rhs + 1e-6 * scale; break;
      case Relation::GreaterEqual: ok = a >= r.rhs - 1e-6 * scale; break;
      case Relation::Equal: ok = std::abs(a - r.rhs) <= 1e-6 * scale; break;
    }
    if (!ok) throw InvalidArgument("warm start violates row " + std::to_string(i));
  }
  for (int j : mip.integer_vars)
    if (std::abs(x[j] - std::round(x[j])) > tol_int)
      throw InvalidArgument("warm start is not integral on column " + std::to_string(j));
}

}  // namespace

MipResult solve_mip(const MipProblem& mip, const MipOptions& opts,
                    const std::optional<std::vector<double>>& warm_start) {
  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  mip.lp.check_well_formed();
  for (int j : mip.integer_vars)
    if (j < 0 || j >= mip.lp.num_vars)
      throw InvalidArgument("integer column " + std::to_string(j) + " does not exist");

  MipResult res;
  bool have_incumbent = false;
  std::vector<double> incumbent;
  double incumbent_obj = kInf;

  auto snap_integers = [&](std::vector<double> x) {
    for (int j : mip.integer_vars) x[j] = std::round(x[j]);
    return x;
  };

  if (warm_start) {
    verify_warm_start(mip, *warm_start, opts.integrality_tol);
    incumbent = snap_integers(*warm_start);
    incumbent_obj = 0.0;
    for (int j = 0; j < mip.lp.num_vars; ++j)
      incumbent_obj += mip.lp.objective[j] * incumbent[j];
    have_incumbent = true;
  }

  LinearProgram work = mip.lp;

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long next_id = 0;
  open.push({-kInf, next_id++, {}});

  double global_bound = -kInf;
  MipStatus status = MipStatus::Infeasible;
  bool stopped = false;

  while (!open.empty()) {
    global_bound = open.top().bound;

    if (have_incumbent) {
      double gap = relative_gap_of(incumbent_obj, global_bound);
      if (gap <= opts.rel_gap + 1e-15) {
        status = gap <= 1e-12 ? MipStatus::Optimal : MipStatus::GapLimit;
        stopped = true;
        break;
      }
    }
    if (opts.time_limit_seconds > 0.0 && elapsed() > opts.time_limit_seconds) {
      status = MipStatus::TimeLimit;
      stopped = true;
      break;
    }

    Node node = open.top();
    open.pop();

    if (have_incumbent &&
        node.bound >= incumbent_obj - 1e-9 * std::max(1.0, std::abs(incumbent_obj)))
      continue;

    std::vector<BoundFix> saved;
    saved.reserve(node.fixes.size());
    for (const auto& f : node.fixes) {
      saved.push_back({f.col, work.lower[f.col], work.upper[f.col]});
      work.lower[f.col] = f.lo;
      work.upper[f.col] = f.hi;
    }

    LpSolution lp_sol;
    try {
      lp_sol = solve_lp(work, std::nullopt, opts.simplex);
    } catch (...) {
      for (auto it = saved.rbegin(); it != saved.rend(); ++it) {
        work.lower[it->col] = it->lo;
        work.upper[it->col] = it->hi;
      }
      throw;
    }
    ++res.lp_solves;
    ++res.nodes_explored;

    for (auto it = saved.rbegin(); it != saved.rend(); ++it) {
      work.lower[it->col] = it->lo;
      work.upper[it->col] = it->hi;
    }

    if (lp_sol.status == LpStatus::Infeasible) continue;
    if (lp_sol.status == LpStatus::Unbounded)
      throw SolveError("relaxation is unbounded; the model is missing bounds");

    double node_obj = std::max(lp_sol.objective_value, node.bound);
    if (have_incumbent &&
        node_obj >= incumbent_obj - 1e-9 * std::max(1.0, std::abs(incumbent_obj)))
      continue;

    int branch_col = -1;
    double branch_dist = opts.integrality_tol;
    for (int j : mip.integer_vars) {
      double x = lp_sol.primal[j];
      double dist = std::abs(x - std::round(x));
      if (dist > branch_dist) {
        branch_dist = dist;
        branch_col = j;
      }
    }

    if (branch_col < 0) {
      if (!have_incumbent ||
          lp_sol.objective_value <
              incumbent_obj - 1e-9 * std::max(1.0, std::abs(incumbent_obj))) {
        incumbent = snap_integers(lp_sol.primal);
        incumbent_obj = lp_sol.objective_value;
        have_incumbent = true;
      }
      continue;
    }

    double x = lp_sol.primal[branch_col];
    Node down{node_obj, next_id++, node.fixes};
    down.fixes.push_back({branch_col, work.lower[branch_col], std::floor(x)});
    Node up{node_obj, next_id++, node.fixes};
    up.fixes.push_back({branch_col, std::ceil(x), work.upper[branch_col]});
    open.push(std::move(down));
    open.push(std::move(up));
  }

  if (!stopped) {
    // Tree exhausted.
    if (have_incumbent) {
      status = MipStatus::Optimal;
      global_bound = incumbent_obj;
    } else {
      status = MipStatus::Infeasible;
      global_bound = kInf;
    }
  }

  res.status = status;
  res.best_bound = global_bound;
  if (have_incumbent) {
    res.primal = std::move(incumbent);
    res.objective_value = incumbent_obj;
    res.gap = status == MipStatus::Optimal ? 0.0
                                           : std::max(0.0, relative_gap_of(incumbent_obj, global_bound));
  } else {
    res.objective_value = kInf;
    res.gap = kInf;
  }
  res.wall_seconds = elapsed();
  return res;
}

}  // namespace ots
