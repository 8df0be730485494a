#include "lp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <unordered_set>

namespace ots {

int LinearProgram::add_variable(double lo, double up, double cost, std::string name) {
  lower.push_back(lo);
  upper.push_back(up);
  objective.push_back(cost);
  if (!name.empty()) {
    var_names.resize(num_vars);
    var_names.push_back(std::move(name));
  } else if (!var_names.empty()) {
    var_names.emplace_back();
  }
  return num_vars++;
}

int LinearProgram::add_row(Relation rel, double rhs, std::vector<std::pair<int, double>> coeffs) {
  rows.push_back({std::move(coeffs), rel, rhs});
  return static_cast<int>(rows.size()) - 1;
}

void LinearProgram::check_well_formed() const {
  if (static_cast<int>(objective.size()) != num_vars ||
      static_cast<int>(lower.size()) != num_vars || static_cast<int>(upper.size()) != num_vars)
    throw InvalidArgument("objective/bound arrays do not match the variable count");
  for (int j = 0; j < num_vars; ++j) {
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j])
      throw InvalidArgument("variable " + std::to_string(j) + " has invalid bounds");
    if (!std::isfinite(objective[j]))
      throw InvalidArgument("variable " + std::to_string(j) + " has a non-finite cost");
  }
  for (size_t i = 0; i < rows.size(); ++i) {
    const LpRow& r = rows[i];
    if (!std::isfinite(r.rhs))
      throw InvalidArgument("row " + std::to_string(i) + " has a non-finite right-hand side");
    std::unordered_set<int> seen;
    for (auto [j, a] : r.coeffs) {
      if (j < 0 || j >= num_vars)
        throw InvalidArgument("row " + std::to_string(i) + " references unknown column " +
                              std::to_string(j));
      if (!std::isfinite(a))
        throw InvalidArgument("row " + std::to_string(i) + " has a non-finite coefficient");
      if (!seen.insert(j).second)
        throw InvalidArgument("row " + std::to_string(i) + " repeats column " + std::to_string(j));
    }
  }
}

namespace {

constexpr double kDegenEps = 1e-10;
constexpr double kSingularEps = 1e-11;

enum VarState : char { kAtLower, kAtUpper, kFree, kBasic };

class Simplex {
 public:
  Simplex(const LinearProgram& lp, const SimplexOptions& opts) : opts_(opts) {
    m_ = lp.num_rows();
    n_ = lp.num_vars;
    cols_.resize(n_ + m_);
    lb_ = lp.lower;
    ub_ = lp.upper;
    lb_.resize(n_ + m_);
    ub_.resize(n_ + m_);
    b_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      const LpRow& r = lp.rows[i];
      for (auto [j, a] : r.coeffs)
        if (a != 0.0) cols_[j].push_back({i, a});
      int s = n_ + i;
      cols_[s].push_back({i, 1.0});
      switch (r.relation) {
        case Relation::LessEqual: lb_[s] = 0.0; ub_[s] = kInf; break;
        case Relation::GreaterEqual: lb_[s] = -kInf; ub_[s] = 0.0; break;
        case Relation::Equal: lb_[s] = 0.0; ub_[s] = 0.0; break;
      }
      b_[i] = r.rhs;
    }
    obj_cost_.assign(n_ + m_, 0.0);
    for (int j = 0; j < n_; ++j) obj_cost_[j] = lp.objective[j];
    iter_cap_ = opts.iteration_limit > 0 ? opts.iteration_limit : 50L * (m_ + n_ + m_);
  }

  LpSolution run(const std::optional<Basis>& warm) {
    LpSolution sol;
    bool warmed = warm && try_warm_start(*warm);
    if (!warmed) {
      if (!cold_start()) {
        // Phase 1 over artificial columns.
        cost_ = phase1_cost_;
        LpStatus st = iterate(/*phase1=*/true);
        if (st != LpStatus::Optimal) throw SolveError("phase one did not terminate cleanly");
        double infeas = 0.0;
        for (int j = n_ + m_; j < total(); ++j) infeas += xval_[j];
        double bscale = 1.0;
        for (double v : b_) bscale = std::max(bscale, std::abs(v));
        if (infeas > opts_.feasibility_tol * bscale) {
          sol.status = LpStatus::Infeasible;
          sol.iterations = iters_;
          return sol;
        }
        expel_artificials();
        for (int j = n_ + m_; j < total(); ++j) {
          lb_[j] = ub_[j] = 0.0;
          if (state_[j] != kBasic) {
            state_[j] = kAtLower;
            xval_[j] = 0.0;
          }
        }
        refactorize_or_throw();
        compute_basics();
      }
    }

    cost_ = obj_cost_;
    cost_.resize(total(), 0.0);
    LpStatus st = iterate(/*phase1=*/false);
    if (st == LpStatus::Unbounded) {
      sol.status = LpStatus::Unbounded;
      sol.iterations = iters_;
      return sol;
    }

    refactorize_or_throw();
    compute_basics();
    snap_basics_to_bounds();

    sol.status = LpStatus::Optimal;
    sol.iterations = iters_;
    sol.primal.assign(xval_.begin(), xval_.begin() + n_);
    sol.objective_value = 0.0;
    for (int j = 0; j < n_; ++j) sol.objective_value += obj_cost_[j] * sol.primal[j];
    sol.basis.basic.resize(m_);
    for (int i = 0; i < m_; ++i) sol.basis.basic[i] = head_[i] < n_ + m_ ? head_[i] : n_ + i;
    for (int j = 0; j < n_ + m_; ++j)
      if (state_[j] == kAtUpper) sol.basis.nonbasic_at_upper.push_back(j);
    check_feasibility(sol);
    return sol;
  }

 private:
  int total() const { return static_cast<int>(cols_.size()); }

  // Nonbasic resting value for a column.
  double rest_value(int j, char st) const {
    if (st == kAtLower) return lb_[j];
    if (st == kAtUpper) return ub_[j];
    return 0.0;
  }

  char natural_state(int j) const {
    if (std::isfinite(lb_[j])) return kAtLower;
    if (std::isfinite(ub_[j])) return kAtUpper;
    return kFree;
  }

  bool try_warm_start(const Basis& warm) {
    if (static_cast<int>(warm.basic.size()) != m_) return false;
    std::vector<char> seen(n_ + m_, 0);
    for (int j : warm.basic) {
      if (j < 0 || j >= n_ + m_ || seen[j]) return false;
      seen[j] = 1;
    }
    state_.assign(n_ + m_, kAtLower);
    xval_.assign(n_ + m_, 0.0);
    for (int j = 0; j < n_ + m_; ++j) {
      state_[j] = natural_state(j);
      xval_[j] = rest_value(j, state_[j]);
    }
    for (int j : warm.nonbasic_at_upper) {
      if (j < 0 || j >= n_ + m_ || seen[j]) continue;
      if (!std::isfinite(ub_[j])) return false;
      state_[j] = kAtUpper;
      xval_[j] = ub_[j];
    }
    head_ = warm.basic;
    for (int j : head_) state_[j] = kBasic;
    if (!refactorize()) return false;
    compute_basics();
    for (int i = 0; i < m_; ++i) {
      int j = head_[i];
      if (xval_[j] < lb_[j] - opts_.feasibility_tol || xval_[j] > ub_[j] + opts_.feasibility_tol)
        return false;
    }
    return true;
  }

  // Slack basis start. Returns true when it is already primal feasible and
  // phase one can be skipped; otherwise artificial columns were added.
  bool cold_start() {
    state_.assign(n_ + m_, kAtLower);
    xval_.assign(n_ + m_, 0.0);
    for (int j = 0; j < n_; ++j) {
      char st = natural_state(j);
      if (st == kAtLower && std::isfinite(ub_[j]) && std::abs(ub_[j]) < std::abs(lb_[j]))
        st = kAtUpper;
      state_[j] = st;
      xval_[j] = rest_value(j, st);
    }

    std::vector<double> activity(m_, 0.0);
    for (int j = 0; j < n_; ++j)
      if (xval_[j] != 0.0)
        for (auto [i, a] : cols_[j]) activity[i] += a * xval_[j];

    head_.resize(m_);
    phase1_cost_.assign(n_ + m_, 0.0);
    bool feasible = true;
    for (int i = 0; i < m_; ++i) {
      int s = n_ + i;
      double implied = b_[i] - activity[i];
      if (implied >= lb_[s] - opts_.feasibility_tol && implied <= ub_[s] + opts_.feasibility_tol) {
        head_[i] = s;
        state_[s] = kBasic;
        xval_[s] = implied;
        continue;
      }
      feasible = false;
      double rest = implied < lb_[s] ? lb_[s] : ub_[s];
      state_[s] = implied < lb_[s] ? kAtLower : kAtUpper;
      xval_[s] = rest;
      double residual = implied - rest;
      int art = total();
      cols_.push_back({{i, residual >= 0.0 ? 1.0 : -1.0}});
      lb_.push_back(0.0);
      ub_.push_back(kInf);
      state_.push_back(kBasic);
      xval_.push_back(std::abs(residual));
      phase1_cost_.push_back(1.0);
      head_[i] = art;
    }
    binv_.assign(static_cast<size_t>(m_) * m_, 0.0);
    if (feasible) {
      for (int i = 0; i < m_; ++i) binv_[static_cast<size_t>(i) * m_ + i] = 1.0;
      return true;
    }
    refactorize_or_throw();
    compute_basics();
    return false;
  }

  // Pivots zero-valued artificial columns out of the basis where possible.
  void expel_artificials() {
    for (int r = 0; r < m_; ++r) {
      if (head_[r] < n_ + m_) continue;
      int enter = -1;
      for (int j = 0; j < n_ + m_ && enter < 0; ++j) {
        if (state_[j] == kBasic) continue;
        double a = 0.0;
        for (auto [i, v] : cols_[j]) a += binv_[static_cast<size_t>(r) * m_ + i] * v;
        if (std::abs(a) > opts_.pivot_tol * 100) enter = j;
      }
      if (enter < 0) continue;  // redundant row, artificial stays pinned at 0
      std::vector<double> w = ftran(enter);
      int leave = head_[r];
      head_[r] = enter;
      state_[enter] = kBasic;
      state_[leave] = kAtLower;
      xval_[leave] = 0.0;
      xval_[enter] = rest_value(enter, natural_state(enter));
      update_binv(w, r);
      compute_basics();
    }
  }

  std::vector<double> ftran(int j) const {
    std::vector<double> w(m_, 0.0);
    for (auto [k, a] : cols_[j])
      for (int i = 0; i < m_; ++i) w[i] += binv_[static_cast<size_t>(i) * m_ + k] * a;
    return w;
  }

  std::vector<double> btran_costs() const {
    std::vector<double> y(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      double c = cost_[head_[i]];
      if (c == 0.0) continue;
      const double* row = binv_.data() + static_cast<size_t>(i) * m_;
      for (int k = 0; k < m_; ++k) y[k] += c * row[k];
    }
    return y;
  }

  bool refactorize() {
    // Gauss-Jordan inversion of the basis matrix with partial pivoting.
    std::vector<double> a(static_cast<size_t>(m_) * m_, 0.0);
    for (int k = 0; k < m_; ++k)
      for (auto [i, v] : cols_[head_[k]]) a[static_cast<size_t>(i) * m_ + k] = v;
    binv_.assign(static_cast<size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) binv_[static_cast<size_t>(i) * m_ + i] = 1.0;

    for (int col = 0; col < m_; ++col) {
      int piv = -1;
      double best = kSingularEps;
      for (int i = col; i < m_; ++i) {
        double v = std::abs(a[static_cast<size_t>(i) * m_ + col]);
        if (v > best) {
          best = v;
          piv = i;
        }
      }
      if (piv < 0) return false;
      if (piv != col) {
        for (int k = 0; k < m_; ++k) {
          std::swap(a[static_cast<size_t>(piv) * m_ + k], a[static_cast<size_t>(col) * m_ + k]);
          std::swap(binv_[static_cast<size_t>(piv) * m_ + k],
                    binv_[static_cast<size_t>(col) * m_ + k]);
        }
      }
      double inv = 1.0 / a[static_cast<size_t>(col) * m_ + col];
      for (int k = 0; k < m_; ++k) {
        a[static_cast<size_t>(col) * m_ + k] *= inv;
        binv_[static_cast<size_t>(col) * m_ + k] *= inv;
      }
      for (int i = 0; i < m_; ++i) {
        if (i == col) continue;
        double f = a[static_cast<size_t>(i) * m_ + col];
        if (f == 0.0) continue;
        for (int k = 0; k < m_; ++k) {
          a[static_cast<size_t>(i) * m_ + k] -= f * a[static_cast<size_t>(col) * m_ + k];
          binv_[static_cast<size_t>(i) * m_ + k] -= f * binv_[static_cast<size_t>(col) * m_ + k];
        }
      }
    }
    return true;
  }

  void refactorize_or_throw() {
    if (!refactorize()) throw SolveError("basis matrix became singular");
  }

  void compute_basics() {
    std::vector<double> r = b_;
    for (int j = 0; j < total(); ++j) {
      if (state_[j] == kBasic || xval_[j] == 0.0) continue;
      for (auto [i, a] : cols_[j]) r[i] -= a * xval_[j];
    }
    for (int i = 0; i < m_; ++i) {
      const double* row = binv_.data() + static_cast<size_t>(i) * m_;
      double v = 0.0;
      for (int k = 0; k < m_; ++k) v += row[k] * r[k];
      xval_[head_[i]] = v;
    }
  }

  // Clears roundoff on basic values that sit essentially on a bound.
  void snap_basics_to_bounds() {
    for (int i = 0; i < m_; ++i) {
      int j = head_[i];
      if (std::isfinite(lb_[j]) && std::abs(xval_[j] - lb_[j]) < 1e-11) xval_[j] = lb_[j];
      if (std::isfinite(ub_[j]) && std::abs(xval_[j] - ub_[j]) < 1e-11) xval_[j] = ub_[j];
    }
  }

  void update_binv(const std::vector<double>& w, int r) {
    double piv = w[r];
    double* rowr = binv_.data() + static_cast<size_t>(r) * m_;
    for (int k = 0; k < m_; ++k) rowr[k] /= piv;
    for (int i = 0; i < m_; ++i) {
      if (i == r || w[i] == 0.0) continue;
      double f = w[i];
      double* rowi = binv_.data() + static_cast<size_t>(i) * m_;
      for (int k = 0; k < m_; ++k) rowi[k] -= f * rowr[k];
    }
  }

  LpStatus iterate(bool phase1) {
    long pivots_since_refactor = 0;
    while (true) {
      if (++iters_ > iter_cap_)
        throw SolveError("simplex iteration limit exceeded (" + std::to_string(iter_cap_) + ")");

      std::vector<double> y = btran_costs();

      int q = -1;
      double best_viol = opts_.feasibility_tol;
      double q_red = 0.0;
      for (int j = 0; j < total(); ++j) {
        char st = state_[j];
        if (st == kBasic || lb_[j] == ub_[j]) continue;
        double d = cost_[j];
        for (auto [i, a] : cols_[j]) d -= y[i] * a;
        double viol = 0.0;
        if (st == kAtLower && d < -best_viol) viol = -d;
        else if (st == kAtUpper && d > best_viol) viol = d;
        else if (st == kFree && std::abs(d) > best_viol) viol = std::abs(d);
        if (viol > 0.0) {
          if (bland_) {
            q = j;
            q_red = d;
            break;
          }
          if (q < 0 || viol > best_viol) {
            q = j;
            q_red = d;
            best_viol = viol;
          }
        }
      }
      if (q < 0) return LpStatus::Optimal;

      int dir = 1;
      if (state_[q] == kAtUpper) dir = -1;
      else if (state_[q] == kFree) dir = q_red < 0.0 ? 1 : -1;

      std::vector<double> w = ftran(q);

      double t_flip = kInf;
      if (std::isfinite(lb_[q]) && std::isfinite(ub_[q])) t_flip = ub_[q] - lb_[q];

      double t_row = kInf;
      int r = -1;
      double r_weight = 0.0;
      for (int i = 0; i < m_; ++i) {
        double rate = dir * w[i];
        if (std::abs(rate) <= opts_.pivot_tol) continue;
        int bcol = head_[i];
        double room, weight = std::abs(rate);
        if (rate > 0.0) {
          if (!std::isfinite(lb_[bcol])) continue;
          room = xval_[bcol] - lb_[bcol];
        } else {
          if (!std::isfinite(ub_[bcol])) continue;
          room = ub_[bcol] - xval_[bcol];
        }
        if (room < 0.0) room = 0.0;
        double t = room / std::abs(rate);
        if (t < t_row - kDegenEps || (t < t_row + kDegenEps && weight > r_weight)) {
          t_row = t;
          r = i;
          r_weight = weight;
        }
      }

      double t = std::min(t_flip, t_row);
      if (!std::isfinite(t)) {
        if (phase1) throw SolveError("phase one became unbounded");
        return LpStatus::Unbounded;
      }

      if (t > kDegenEps) {
        consec_degen_ = 0;
        bland_ = false;
      } else if (++consec_degen_ >= opts_.degenerate_limit) {
        bland_ = true;
      }

      if (t_flip <= t_row) {
        // Bound flip: q jumps to its other bound, basis unchanged.
        for (int i = 0; i < m_; ++i)
          if (w[i] != 0.0) xval_[head_[i]] -= dir * w[i] * t_flip;
        state_[q] = state_[q] == kAtLower ? kAtUpper : kAtLower;
        xval_[q] = state_[q] == kAtLower ? lb_[q] : ub_[q];
        continue;
      }

      for (int i = 0; i < m_; ++i)
        if (i != r && w[i] != 0.0) xval_[head_[i]] -= dir * w[i] * t;
      int leave = head_[r];
      state_[leave] = dir * w[r] > 0.0 ? kAtLower : kAtUpper;
      xval_[leave] = dir * w[r] > 0.0 ? lb_[leave] : ub_[leave];
      xval_[q] = xval_[q] + dir * t;
      head_[r] = q;
      state_[q] = kBasic;
      update_binv(w, r);

      if (++pivots_since_refactor >= 500) {
        refactorize_or_throw();
        compute_basics();
        pivots_since_refactor = 0;
      }
    }
  }

  void check_feasibility(const LpSolution& sol) const {
    for (int j = 0; j < n_; ++j) {
      double scale = std::max({1.0, std::abs(lb_[j]), std::abs(ub_[j])});
      if (sol.primal[j] < lb_[j] - opts_.feasibility_tol * scale ||
          sol.primal[j] > ub_[j] + opts_.feasibility_tol * scale)
        throw SolveError("numerical trouble: variable bound violated after solve");
    }
    std::vector<double> activity(m_, 0.0);
    for (int j = 0; j < n_; ++j) {
      if (sol.primal[j] == 0.0) continue;
      for (auto [i, a] : cols_[j]) activity[i] += a * sol.primal[j];
    }
    for (int i = 0; i < m_; ++i) {
      int s = n_ + i;
      double slack = b_[i] - activity[i];
      double scale = std::max(1.0, std::abs(b_[i]));
      if (slack < lb_[s] - opts_.feasibility_tol * scale ||
          slack > ub_[s] + opts_.feasibility_tol * scale)
        throw SolveError("numerical trouble: row violated after solve");
    }
  }

  const SimplexOptions& opts_;
  int m_ = 0, n_ = 0;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> lb_, ub_, b_, xval_, cost_, obj_cost_, phase1_cost_;
  std::vector<char> state_;
  std::vector<int> head_;
  std::vector<double> binv_;
  long iters_ = 0, iter_cap_ = 0, consec_degen_ = 0;
  bool bland_ = false;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const std::optional<Basis>& warm,
                    const SimplexOptions& opts) {
  lp.check_well_formed();
  for (int j = 0; j < lp.num_vars; ++j)
    if (lp.lower[j] > lp.upper[j]) {
      LpSolution sol;
      sol.status = LpStatus::Infeasible;
      return sol;
    }
  Simplex engine(lp, opts);
  return engine.run(warm);
}

namespace {

std::string num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string var_name(const LinearProgram& lp, int j) {
  if (j < static_cast<int>(lp.var_names.size()) && !lp.var_names[j].empty())
    return lp.var_names[j];
  return "x" + std::to_string(j);
}

void write_terms(std::ostream& out, const LinearProgram& lp,
                 const std::vector<std::pair<int, double>>& terms) {
  bool first = true;
  int on_line = 0;
  for (auto [j, a] : terms) {
    if (a == 0.0) continue;
    if (first) {
      if (a < 0) out << "- ";
      first = false;
    } else {
      out << (a < 0 ? " - " : " + ");
    }
    out << num(std::abs(a)) << " " << var_name(lp, j);
    if (++on_line == 8) {
      out << "\n   ";
      on_line = 0;
    }
  }
  if (first) out << "0 " << var_name(lp, 0);
}

}  // namespace

void write_lp_format(std::ostream& out, const LinearProgram& lp,
                     const std::vector<int>& integer_vars) {
  out << "Minimize\n obj: ";
  std::vector<std::pair<int, double>> obj_terms;
  for (int j = 0; j < lp.num_vars; ++j) obj_terms.push_back({j, lp.objective[j]});
  write_terms(out, lp, obj_terms);
  out << "\nSubject To\n";
  for (int i = 0; i < lp.num_rows(); ++i) {
    const LpRow& r = lp.rows[i];
    out << " c" << i << ": ";
    write_terms(out, lp, r.coeffs);
    switch (r.relation) {
      case Relation::LessEqual: out << " <= "; break;
      case Relation::GreaterEqual: out << " >= "; break;
      case Relation::Equal: out << " = "; break;
    }
    out << num(r.rhs) << "\n";
  }
  out << "Bounds\n";
  for (int j = 0; j < lp.num_vars; ++j) {
    double lo = lp.lower[j], hi = lp.upper[j];
    std::string name = var_name(lp, j);
    if (lo == 0.0 && hi == kInf) continue;
    if (lo == hi) {
      out << " " << name << " = " << num(lo) << "\n";
    } else if (!std::isfinite(lo) && !std::isfinite(hi)) {
      out << " " << name << " free\n";
    } else if (!std::isfinite(lo)) {
      out << " -infinity <= " << name << " <= " << num(hi) << "\n";
    } else if (!std::isfinite(hi)) {
      out << " " << name << " >= " << num(lo) << "\n";
    } else {
      out << " " << num(lo) << " <= " << name << " <= " << num(hi) << "\n";
    }
  }
  std::vector<int> binaries, generals;
  for (int j : integer_vars) {
    if (lp.lower[j] >= 0.0 && lp.upper[j] <= 1.0)
      binaries.push_back(j);
    else
      generals.push_back(j);
  }
  if (!binaries.empty()) {
    out << "Binaries\n";
    for (int j : binaries) out << " " << var_name(lp, j);
    out << "\n";
  }
  if (!generals.empty()) {
    out << "Generals\n";
    for (int j : generals) out << " " << var_name(lp, j);
    out << "\n";
  }
  out << "End\n";
}

}  // namespace ots
