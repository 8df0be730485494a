#include "tableau_simplex.hpp"

#include <cmath>
#include <limits>

namespace testsupport {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivTol = 1e-9;
constexpr double kFeasTol = 1e-7;

struct VarMap {
  enum Kind { kShift, kMirror, kSplit } kind;
  int col1 = -1, col2 = -1;
  double offset = 0.0;
};

}  // namespace

DenseResult tableau_solve(const DenseLp& lp) {
  // 1) Rewrite onto non-negative variables.
  std::vector<VarMap> map(lp.n);
  int ncols = 0;
  for (int j = 0; j < lp.n; ++j) {
    if (std::isfinite(lp.lo[j])) {
      map[j] = {VarMap::kShift, ncols++, -1, lp.lo[j]};
    } else if (std::isfinite(lp.hi[j])) {
      map[j] = {VarMap::kMirror, ncols++, -1, lp.hi[j]};
    } else {
      map[j] = {VarMap::kSplit, ncols, ncols + 1, 0.0};
      ncols += 2;
    }
  }

  struct Row {
    std::vector<double> a;
    int rel;
    double b;
  };
  std::vector<Row> rows;

  auto transform_into = [&](const std::vector<double>& coeff, double rhs, int rel) {
    Row row;
    row.a.assign(ncols, 0.0);
    row.b = rhs;
    row.rel = rel;
    for (int j = 0; j < lp.n; ++j) {
      double a = coeff[j];
      if (a == 0.0) continue;
      switch (map[j].kind) {
        case VarMap::kShift:
          row.a[map[j].col1] += a;
          row.b -= a * map[j].offset;
          break;
        case VarMap::kMirror:
          row.a[map[j].col1] -= a;
          row.b -= a * map[j].offset;
          break;
        case VarMap::kSplit:
          row.a[map[j].col1] += a;
          row.a[map[j].col2] -= a;
          break;
      }
    }
    rows.push_back(std::move(row));
  };

  for (size_t i = 0; i < lp.a.size(); ++i) transform_into(lp.a[i], lp.b[i], lp.rel[i]);

  // Explicit upper-bound rows for ranged variables.
  for (int j = 0; j < lp.n; ++j) {
    if (map[j].kind == VarMap::kShift && std::isfinite(lp.hi[j])) {
      Row row;
      row.a.assign(ncols, 0.0);
      row.a[map[j].col1] = 1.0;
      row.rel = -1;
      row.b = lp.hi[j] - lp.lo[j];
      rows.push_back(std::move(row));
    }
  }

  std::vector<double> cost(ncols, 0.0);
  for (int j = 0; j < lp.n; ++j) {
    switch (map[j].kind) {
      case VarMap::kShift: cost[map[j].col1] += lp.c[j]; break;
      case VarMap::kMirror: cost[map[j].col1] -= lp.c[j]; break;
      case VarMap::kSplit:
        cost[map[j].col1] += lp.c[j];
        cost[map[j].col2] -= lp.c[j];
        break;
    }
  }

  // 2) Standard form with b >= 0, slacks, and artificials.
  int m = static_cast<int>(rows.size());
  for (auto& row : rows) {
    if (row.b < 0.0) {
      for (double& v : row.a) v = -v;
      row.b = -row.b;
      row.rel = -row.rel;
    }
  }

  int nslack = 0;
  for (const auto& row : rows)
    if (row.rel != 0) ++nslack;
  int width = ncols + nslack;

  std::vector<std::vector<double>> T(m, std::vector<double>(width, 0.0));
  std::vector<double> rhs(m);
  std::vector<int> basis(m, -1);
  std::vector<char> is_artificial(width, 0);

  int next_slack = ncols;
  std::vector<int> need_artificial;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < ncols; ++j) T[i][j] = rows[i].a[j];
    rhs[i] = rows[i].b;
    if (rows[i].rel == -1) {
      T[i][next_slack] = 1.0;
      basis[i] = next_slack++;
    } else if (rows[i].rel == 1) {
      T[i][next_slack] = -1.0;
      ++next_slack;
      need_artificial.push_back(i);
    } else {
      need_artificial.push_back(i);
    }
  }
  for (int i : need_artificial) {
    for (auto& row : T) row.push_back(0.0);
    is_artificial.push_back(1);
    T[i][width] = 1.0;
    basis[i] = width;
    ++width;
  }

  auto pivot = [&](int r, int q) {
    double p = T[r][q];
    for (int j = 0; j < width; ++j) T[r][j] /= p;
    rhs[r] /= p;
    for (int i = 0; i < m; ++i) {
      if (i == r || T[i][q] == 0.0) continue;
      double f = T[i][q];
      for (int j = 0; j < width; ++j) T[i][j] -= f * T[r][j];
      rhs[i] -= f * rhs[r];
    }
    basis[r] = q;
  };

  // Bland's rule simplex on the current cost vector. Returns false when the
  // problem is unbounded in this phase.
  auto run = [&](const std::vector<double>& c) {
    while (true) {
      std::vector<double> cbar = c;
      for (int i = 0; i < m; ++i) {
        double cb = c[basis[i]];
        if (cb == 0.0) continue;
        for (int j = 0; j < width; ++j) cbar[j] -= cb * T[i][j];
      }
      int q = -1;
      for (int j = 0; j < width; ++j)
        if (cbar[j] < -kPivTol) {
          q = j;
          break;
        }
      if (q < 0) return true;
      int r = -1;
      double best = kInf;
      for (int i = 0; i < m; ++i) {
        if (T[i][q] <= kPivTol) continue;
        double ratio = rhs[i] / T[i][q];
        if (ratio < best - 1e-12 || (ratio < best + 1e-12 && (r < 0 || basis[i] < basis[r]))) {
          best = ratio;
          r = i;
        }
      }
      if (r < 0) return false;
      pivot(r, q);
    }
  };

  DenseResult out;

  bool any_artificial = false;
  for (int j = 0; j < width; ++j) any_artificial |= is_artificial[j] != 0;
  if (any_artificial) {
    std::vector<double> c1(width, 0.0);
    for (int j = 0; j < width; ++j)
      if (is_artificial[j]) c1[j] = 1.0;
    if (!run(c1)) {
      out.status = DenseResult::kInfeasible;  // phase one cannot be unbounded
      return out;
    }
    double infeas = 0.0;
    for (int i = 0; i < m; ++i)
      if (is_artificial[basis[i]]) infeas += rhs[i];
    if (infeas > kFeasTol) {
      out.status = DenseResult::kInfeasible;
      return out;
    }
    // Remove artificials from the basis, dropping redundant rows.
    for (int i = m - 1; i >= 0; --i) {
      if (!is_artificial[basis[i]]) continue;
      int q = -1;
      for (int j = 0; j < width && q < 0; ++j)
        if (!is_artificial[j] && std::abs(T[i][j]) > 1e-7) q = j;
      if (q >= 0) {
        pivot(i, q);
      } else {
        T.erase(T.begin() + i);
        rhs.erase(rhs.begin() + i);
        basis.erase(basis.begin() + i);
        --m;
      }
    }
    for (int j = 0; j < width; ++j)
      if (is_artificial[j])
        for (int i = 0; i < m; ++i) T[i][j] = 0.0;
  }

  std::vector<double> c2(width, 0.0);
  for (int j = 0; j < ncols; ++j) c2[j] = cost[j];
  if (!run(c2)) {
    out.status = DenseResult::kUnbounded;
    return out;
  }

  std::vector<double> s(width, 0.0);
  for (int i = 0; i < m; ++i) s[basis[i]] = rhs[i];

  out.status = DenseResult::kOptimal;
  out.x.assign(lp.n, 0.0);
  for (int j = 0; j < lp.n; ++j) {
    switch (map[j].kind) {
      case VarMap::kShift: out.x[j] = map[j].offset + s[map[j].col1]; break;
      case VarMap::kMirror: out.x[j] = map[j].offset - s[map[j].col1]; break;
      case VarMap::kSplit: out.x[j] = s[map[j].col1] - s[map[j].col2]; break;
    }
  }
  out.objective = 0.0;
  for (int j = 0; j < lp.n; ++j) out.objective += lp.c[j] * out.x[j];
  return out;
}

}  // namespace testsupport
