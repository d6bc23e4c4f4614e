#include "decomine/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace decomine::lp {

const char* status_name(Status s) {
  switch (s) {
    case Status::kOptimal: return "optimal";
    case Status::kInfeasible: return "infeasible";
    case Status::kNumericallyUnstable: return "numerically_unstable";
  }
  return "numerically_unstable";
}

std::string to_text(const Problem& p) {
  std::ostringstream out;
  out.precision(17);
  out << (p.sense == Sense::kMaximize ? "max" : "min");
  for (double c : p.objective) out << ' ' << c;
  out << '\n';
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    for (double a : p.rows[i]) out << a << ' ';
    out << "| " << p.rhs[i] << '\n';
  }
  return out.str();
}

namespace {

// Row-major tableau. The last row holds reduced costs; the last column the
// right-hand side (the objective cell stores minus the objective value).
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double* row(std::size_t r) { return data_.data() + r * cols_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t pr, std::size_t pc) {
    double* prow = row(pr);
    const double inv = 1.0 / prow[pc];
    for (std::size_t c = 0; c < cols_; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == pr) continue;
      double* rr = row(r);
      const double f = rr[pc];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < cols_; ++c) rr[c] -= f * prow[c];
      rr[pc] = 0.0;
    }
  }

  void erase_row(std::size_t r) {
    data_.erase(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
    --rows_;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

enum class Outcome { kOptimal, kUnbounded, kPivotLimit };

constexpr double kReducedCostTolerance = 1e-9;

// Minimizes over the tableau. Only columns below `enterable` may enter.
Outcome run_simplex(Tableau& t, std::vector<std::size_t>& basis, std::size_t enterable,
                    const Options& opt, std::size_t& pivots) {
  const std::size_t m = t.rows() - 1;
  const std::size_t rhs = t.cols() - 1;
  const std::size_t dantzig_limit =
      opt.dantzig_pivots != 0 ? opt.dantzig_pivots : 20 * (m + t.cols());
  std::size_t local = 0;
  while (true) {
    if (opt.max_pivots != 0 && pivots >= opt.max_pivots) return Outcome::kPivotLimit;
    const bool bland = local >= dantzig_limit;
    const double* cost = t.row(m);
    std::size_t enter = enterable;
    double best = -kReducedCostTolerance;
    for (std::size_t c = 0; c < enterable; ++c) {
      if (cost[c] < best) {
        enter = c;
        if (bland) break;
        best = cost[c];
      }
    }
    if (enter == enterable) return Outcome::kOptimal;

    std::size_t leave = m;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < m; ++r) {
      const double a = t.at(r, enter);
      if (a <= opt.pivot_tolerance) continue;
      const double ratio = std::max(t.at(r, rhs), 0.0) / a;
      if (ratio < best_ratio - 1e-12 ||
          (ratio <= best_ratio + 1e-12 && leave != m && basis[r] < basis[leave])) {
        if (ratio < best_ratio) best_ratio = ratio;
        leave = r;
      }
    }
    if (leave == m) return Outcome::kUnbounded;
    t.pivot(leave, enter);
    basis[leave] = enter;
    ++pivots;
    ++local;
  }
}

// Solves the square system M z = y by Gaussian elimination with partial
// pivoting. Returns false when M is numerically singular.
bool solve_dense(std::vector<std::vector<double>> mat, std::vector<double> y,
                 std::vector<double>& z) {
  const std::size_t n = y.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(mat[r][col]) > std::fabs(mat[piv][col])) piv = r;
    }
    if (std::fabs(mat[piv][col]) < 1e-13) return false;
    std::swap(mat[piv], mat[col]);
    std::swap(y[piv], y[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = mat[r][col] / mat[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) mat[r][c] -= f * mat[col][c];
      y[r] -= f * y[col];
    }
  }
  z.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = y[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= mat[i][c] * z[c];
    z[i] = s / mat[i][i];
  }
  return true;
}

double max_scaled_residual(const Problem& p, const std::vector<double>& x) {
  double worst = 0.0;
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < p.num_vars; ++j) s += p.rows[i][j] * x[j];
    worst = std::max(worst, std::fabs(s - p.rhs[i]) / (1.0 + std::fabs(p.rhs[i])));
  }
  return worst;
}

double min_entry(const std::vector<double>& x) {
  return x.empty() ? 0.0 : *std::min_element(x.begin(), x.end());
}

}  // namespace

Solution solve(const Problem& p, const Options& opt) {
  const std::size_t n = p.num_vars;
  const std::size_t m = p.rows.size();
  if (p.objective.size() != n || p.rhs.size() != m) {
    throw std::invalid_argument("lp::solve: inconsistent problem dimensions");
  }
  for (const auto& r : p.rows) {
    if (r.size() != n) throw std::invalid_argument("lp::solve: row length != num_vars");
    for (double a : r) {
      if (!std::isfinite(a)) throw std::invalid_argument("lp::solve: non-finite coefficient");
    }
  }
  if (opt.dump) *opt.dump << to_text(p);

  Solution sol;
  if (n == 0) {
    bool feasible = true;
    for (double b : p.rhs) feasible &= std::fabs(b) <= opt.feasibility_tolerance;
    sol.status = feasible ? Status::kOptimal : Status::kInfeasible;
    return sol;
  }

  // Phase one: artificial basis, minimize the sum of artificials.
  Tableau t(m + 1, n + m + 1);
  const std::size_t rhs = n + m;
  std::vector<std::size_t> basis(m);
  std::vector<std::size_t> row_origin(m);
  double b_scale = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double sign = p.rhs[i] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) t.at(i, j) = sign * p.rows[i][j];
    t.at(i, n + i) = 1.0;
    t.at(i, rhs) = sign * p.rhs[i];
    basis[i] = n + i;
    row_origin[i] = i;
    b_scale = std::max(b_scale, std::fabs(p.rhs[i]));
  }
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += t.at(i, j);
    t.at(m, j) = -s;
  }
  {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += t.at(i, rhs);
    t.at(m, rhs) = -s;
  }
  Outcome out = run_simplex(t, basis, n, opt, sol.pivots);
  if (out != Outcome::kOptimal) return sol;
  if (-t.at(m, rhs) > opt.feasibility_tolerance * b_scale) {
    sol.status = Status::kInfeasible;
    return sol;
  }

  // Drive artificials out of the basis; rows where that is impossible are
  // linear combinations of the others.
  for (std::size_t r = 0; r < t.rows() - 1;) {
    if (basis[r] < n) {
      ++r;
      continue;
    }
    std::size_t best = n;
    double best_abs = opt.pivot_tolerance;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = std::fabs(t.at(r, j));
      if (a > best_abs) {
        best_abs = a;
        best = j;
      }
    }
    if (best == n) {
      t.erase_row(r);
      basis.erase(basis.begin() + static_cast<std::ptrdiff_t>(r));
      row_origin.erase(row_origin.begin() + static_cast<std::ptrdiff_t>(r));
      continue;
    }
    t.pivot(r, best);
    basis[r] = best;
    ++sol.pivots;
    ++r;
  }

  // Phase two on the structural columns only.
  const std::size_t mr = t.rows() - 1;
  Tableau t2(mr + 1, n + 1);
  for (std::size_t i = 0; i < mr; ++i) {
    for (std::size_t j = 0; j < n; ++j) t2.at(i, j) = t.at(i, j);
    t2.at(i, n) = t.at(i, rhs);
  }
  const double dir = p.sense == Sense::kMaximize ? -1.0 : 1.0;
  for (std::size_t j = 0; j < n; ++j) t2.at(mr, j) = dir * p.objective[j];
  t2.at(mr, n) = 0.0;
  for (std::size_t i = 0; i < mr; ++i) {
    const double cb = dir * p.objective[basis[i]];
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j <= n; ++j) t2.at(mr, j) -= cb * t2.at(i, j);
  }
  out = run_simplex(t2, basis, n, opt, sol.pivots);
  if (out != Outcome::kOptimal) return sol;  // unbounded or pivot cap

  std::vector<double> x_tab(n, 0.0);
  for (std::size_t i = 0; i < mr; ++i) x_tab[basis[i]] = t2.at(i, n);

  // Recompute the basic solution from the original rows for accuracy.
  std::vector<double> x_ref;
  {
    std::vector<std::vector<double>> mat(mr, std::vector<double>(mr));
    std::vector<double> y(mr);
    for (std::size_t i = 0; i < mr; ++i) {
      for (std::size_t k = 0; k < mr; ++k) mat[i][k] = p.rows[row_origin[i]][basis[k]];
      y[i] = p.rhs[row_origin[i]];
    }
    std::vector<double> z;
    if (solve_dense(std::move(mat), std::move(y), z)) {
      x_ref.assign(n, 0.0);
      for (std::size_t k = 0; k < mr; ++k) x_ref[basis[k]] = z[k];
    }
  }

  const double res_tab = max_scaled_residual(p, x_tab);
  std::vector<double>* chosen = &x_tab;
  double residual = res_tab;
  if (!x_ref.empty()) {
    const double res_ref = max_scaled_residual(p, x_ref);
    if (res_ref <= res_tab && min_entry(x_ref) >= -1e-9) {
      chosen = &x_ref;
      residual = res_ref;
    }
  }
  sol.assignment = std::move(*chosen);
  sol.max_residual = residual;
  sol.value = 0.0;
  for (std::size_t j = 0; j < n; ++j) sol.value += p.objective[j] * sol.assignment[j];
  const bool ok = residual <= opt.feasibility_tolerance && min_entry(sol.assignment) >= -1e-9;
  sol.status = ok ? Status::kOptimal : Status::kNumericallyUnstable;
  return sol;
}

}  // namespace decomine::lp
