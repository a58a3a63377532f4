#include "flexcert/lp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flexcert/error.hpp"

namespace flexcert::lp {

namespace {

// x_j = offset + sign * y[pos] (- y[neg] when the variable is free).
struct VarMap {
  double offset = 0.0;
  double sign = 1.0;
  std::size_t pos = 0;
  std::ptrdiff_t neg = -1;
};

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : m_(rows), n_(cols), width_(cols + 1), t_(rows * (cols + 1), 0.0), basis_(rows) {}

  double& at(std::size_t r, std::size_t c) { return t_[r * width_ + c]; }
  double at(std::size_t r, std::size_t c) const { return t_[r * width_ + c]; }
  double& rhs(std::size_t r) { return t_[r * width_ + n_]; }
  double rhs(std::size_t r) const { return t_[r * width_ + n_]; }

  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  std::vector<std::size_t>& basis() { return basis_; }
  const std::vector<std::size_t>& basis() const { return basis_; }

  // Reduced-cost row d (size n_+1, last entry holds -objective).
  void pivot(std::size_t r, std::size_t c, std::vector<Vector*> cost_rows) {
    double* pr = &t_[r * width_];
    const double inv = 1.0 / pr[c];
    nz_.clear();
    for (std::size_t j = 0; j < width_; ++j) {
      if (pr[j] != 0.0) {
        pr[j] *= inv;
        nz_.push_back(j);
      }
    }
    pr[c] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &t_[i * width_];
      const double f = row[c];
      if (f == 0.0) continue;
      for (std::size_t j : nz_) row[j] -= f * pr[j];
      row[c] = 0.0;
    }
    for (Vector* d : cost_rows) {
      const double f = (*d)[c];
      if (f == 0.0) continue;
      for (std::size_t j : nz_) (*d)[j] -= f * pr[j];
      (*d)[c] = 0.0;
    }
    basis_[r] = c;
  }

 private:
  std::size_t m_, n_, width_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> nz_;
};

enum class PhaseResult { Optimal, Unbounded };

struct SimplexRun {
  Tableau& tab;
  const Tolerances& tol;
  std::size_t enter_limit;  // columns [0, enter_limit) may enter
  std::size_t degenerate_limit;
  std::size_t iteration_cap;
  std::size_t iterations = 0;

  PhaseResult run(Vector& d, std::vector<Vector*> also_update) {
    std::size_t degenerate = 0;
    bool bland = false;
    double cost_scale = 1.0;
    for (std::size_t j = 0; j < enter_limit; ++j) cost_scale = std::max(cost_scale, std::abs(d[j]));
    const double opt_tol = tol.optimality * cost_scale;
    std::size_t tiny_pivots = 0;
    while (true) {
      if (++iterations > iteration_cap)
        fail(ErrorKind::NumericalBreakdown, "simplex: iteration cap reached");
      std::size_t enter = enter_limit;
      if (bland) {
        for (std::size_t j = 0; j < enter_limit; ++j)
          if (d[j] < -opt_tol) {
            enter = j;
            break;
          }
      } else {
        double best = -opt_tol;
        for (std::size_t j = 0; j < enter_limit; ++j)
          if (d[j] < best) {
            best = d[j];
            enter = j;
          }
      }
      if (enter == enter_limit) return PhaseResult::Optimal;

      std::size_t leave = tab.rows();
      double best_ratio = 0.0;
      double best_pivot = 0.0;
      for (std::size_t i = 0; i < tab.rows(); ++i) {
        const double a = tab.at(i, enter);
        if (a <= tol.pivot) continue;
        const double ratio = std::max(tab.rhs(i), 0.0) / a;
        if (leave == tab.rows()) {
          leave = i;
          best_ratio = ratio;
          best_pivot = a;
          continue;
        }
        const double gap = ratio - best_ratio;
        const double tie = 1e-12 * (1.0 + best_ratio);
        if (gap < -tie) {
          leave = i;
          best_ratio = ratio;
          best_pivot = a;
        } else if (gap <= tie) {
          const bool better = bland ? tab.basis()[i] < tab.basis()[leave] : a > best_pivot;
          if (better) {
            leave = i;
            best_ratio = ratio;
            best_pivot = a;
          }
        }
      }
      if (leave == tab.rows()) {
        // No positive entry: check for a column that is merely numerically
        // flat before declaring unboundedness.
        bool any_small = false;
        for (std::size_t i = 0; i < tab.rows(); ++i)
          if (tab.at(i, enter) > tol.breakdown) any_small = true;
        if (any_small && ++tiny_pivots > 3)
          fail(ErrorKind::NumericalBreakdown, "simplex: repeated tiny pivots");
        if (!any_small) return PhaseResult::Unbounded;
        // Skip this column once by zeroing its reduced cost locally.
        d[enter] = 0.0;
        continue;
      }
      if (best_ratio <= 1e-12) {
        if (++degenerate > degenerate_limit) bland = true;
      }
      std::vector<Vector*> rows{&d};
      rows.insert(rows.end(), also_update.begin(), also_update.end());
      tab.pivot(leave, enter, rows);
      // Clamp round-off in the basic solution.
      for (std::size_t i = 0; i < tab.rows(); ++i)
        if (tab.rhs(i) < 0.0 && tab.rhs(i) > -tol.breakdown) tab.rhs(i) = 0.0;
    }
  }
};

}  // namespace

const char* to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "Optimal";
    case Status::Infeasible: return "Infeasible";
    case Status::Unbounded: return "Unbounded";
  }
  return "Unknown";
}

double max_violation(const LinearProgram& lp, const Vector& x) {
  double worst = 0.0;
  for (const auto& c : lp.constraints) {
    const double lhs = dot(c.coefficients, x);
    switch (c.relation) {
      case Relation::GreaterEqual: worst = std::max(worst, c.rhs - lhs); break;
      case Relation::LessEqual: worst = std::max(worst, lhs - c.rhs); break;
      case Relation::Equal: worst = std::max(worst, std::abs(lhs - c.rhs)); break;
    }
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    worst = std::max(worst, lp.bounds[j].lower - x[j]);
    worst = std::max(worst, x[j] - lp.bounds[j].upper);
  }
  return worst;
}

LpOutcome solve(const LinearProgram& lp, const Tolerances& tol) {
  const std::size_t n = lp.num_variables();
  if (lp.bounds.size() != n)
    fail(ErrorKind::DimensionMismatch, "lp: bounds size differs from objective size");
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
    const auto& c = lp.constraints[i];
    if (c.coefficients.size() != n)
      fail(ErrorKind::DimensionMismatch,
           "lp: constraint " + std::to_string(i) + " has " +
               std::to_string(c.coefficients.size()) + " coefficients, expected " +
               std::to_string(n));
    if (!std::isfinite(c.rhs))
      fail(ErrorKind::NumericalBreakdown, "lp: non-finite rhs");
    for (double a : c.coefficients)
      if (!std::isfinite(a)) fail(ErrorKind::NumericalBreakdown, "lp: non-finite coefficient");
  }
  for (double c : lp.objective)
    if (!std::isfinite(c)) fail(ErrorKind::NumericalBreakdown, "lp: non-finite objective");

  LpOutcome out;
  for (const auto& b : lp.bounds)
    if (b.lower > b.upper || b.lower == kInf || b.upper == -kInf) return out;  // Infeasible

  // Map original variables onto nonnegative internal columns.
  std::vector<VarMap> vars(n);
  std::size_t ny = 0;
  std::vector<std::pair<std::size_t, double>> bound_rows;  // y[col] <= value
  for (std::size_t j = 0; j < n; ++j) {
    const auto [lo, hi] = lp.bounds[j];
    VarMap& v = vars[j];
    if (std::isfinite(lo)) {
      v.offset = lo;
      v.pos = ny++;
      if (std::isfinite(hi)) bound_rows.emplace_back(v.pos, hi - lo);
    } else if (std::isfinite(hi)) {
      v.offset = hi;
      v.sign = -1.0;
      v.pos = ny++;
    } else {
      v.pos = ny++;
      v.neg = static_cast<std::ptrdiff_t>(ny++);
    }
  }

  const std::size_t nc = lp.constraints.size();
  const std::size_t m = nc + bound_rows.size();

  struct RowSpec {
    Relation rel;
    double rhs;
    bool flipped = false;
  };
  std::vector<RowSpec> spec(m);
  std::vector<Vector> rows(m, Vector(ny, 0.0));
  for (std::size_t i = 0; i < nc; ++i) {
    const auto& c = lp.constraints[i];
    double rhs = c.rhs;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = c.coefficients[j];
      if (a == 0.0) continue;
      rhs -= a * vars[j].offset;
      rows[i][vars[j].pos] += a * vars[j].sign;
      if (vars[j].neg >= 0) rows[i][static_cast<std::size_t>(vars[j].neg)] -= a;
    }
    spec[i] = {c.relation, rhs};
  }
  for (std::size_t k = 0; k < bound_rows.size(); ++k) {
    rows[nc + k][bound_rows[k].first] = 1.0;
    spec[nc + k] = {Relation::LessEqual, bound_rows[k].second};
  }
  double rhs_scale = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    auto& s = spec[i];
    const bool flip = s.rhs < 0.0 || (s.rhs == 0.0 && s.rel == Relation::GreaterEqual);
    if (flip) {
      s.flipped = true;
      s.rhs = -s.rhs;
      for (double& a : rows[i]) a = -a;
      if (s.rel == Relation::GreaterEqual) s.rel = Relation::LessEqual;
      else if (s.rel == Relation::LessEqual) s.rel = Relation::GreaterEqual;
    }
    rhs_scale = std::max(rhs_scale, s.rhs);
  }

  std::size_t n_slack = 0, n_art = 0;
  for (const auto& s : spec) {
    if (s.rel != Relation::Equal) ++n_slack;
    if (s.rel != Relation::LessEqual) ++n_art;
  }
  const std::size_t slack_start = ny;
  const std::size_t art_start = ny + n_slack;
  const std::size_t ncols = art_start + n_art;
  Tableau tab(m, ncols);
  std::vector<std::size_t> unit_col(m);
  {
    std::size_t si = slack_start, ai = art_start;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < ny; ++j) tab.at(i, j) = rows[i][j];
      tab.rhs(i) = spec[i].rhs;
      switch (spec[i].rel) {
        case Relation::LessEqual:
          tab.at(i, si) = 1.0;
          unit_col[i] = si++;
          break;
        case Relation::GreaterEqual:
          tab.at(i, si++) = -1.0;
          tab.at(i, ai) = 1.0;
          unit_col[i] = ai++;
          break;
        case Relation::Equal:
          tab.at(i, ai) = 1.0;
          unit_col[i] = ai++;
          break;
      }
      tab.basis()[i] = unit_col[i];
    }
  }

  // Phase-2 cost row over internal columns (computed before phase 1 so it is
  // kept up to date through phase-1 pivots).
  Vector cost(ncols + 1, 0.0);
  double cost_offset = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double c = lp.objective[j];
    cost_offset += c * vars[j].offset;
    cost[vars[j].pos] += c * vars[j].sign;
    if (vars[j].neg >= 0) cost[static_cast<std::size_t>(vars[j].neg)] -= c;
  }

  const std::size_t cap = 50 * (m + ncols) + 1000;
  const std::size_t degenerate_limit = 3 * (m + n);
  std::size_t iterations = 0;

  if (n_art > 0) {
    Vector phase1(ncols + 1, 0.0);
    for (std::size_t j = art_start; j < ncols; ++j) phase1[j] = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (tab.basis()[i] < art_start) continue;
      for (std::size_t j = 0; j <= ncols; ++j) phase1[j] -= (j < ncols ? tab.at(i, j) : tab.rhs(i));
    }
    SimplexRun p1{tab, tol, art_start, degenerate_limit, cap};
    p1.run(phase1, {&cost});
    iterations += p1.iterations;
    const double infeasibility = -phase1[ncols];
    if (infeasibility > tol.feasibility * (1.0 + rhs_scale)) {
      out.status = Status::Infeasible;
      out.iterations = iterations;
      return out;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (tab.basis()[i] < art_start) continue;
      std::size_t best = art_start;
      double mag = tol.pivot;
      for (std::size_t j = 0; j < art_start; ++j)
        if (std::abs(tab.at(i, j)) > mag) {
          mag = std::abs(tab.at(i, j));
          best = j;
        }
      if (best < art_start) tab.pivot(i, best, {&cost, &phase1});
    }
  }

  // Bring the phase-2 cost row into reduced form for the current basis.
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t b = tab.basis()[i];
    const double cb = cost[b];
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j < ncols; ++j) cost[j] -= cb * tab.at(i, j);
    cost[ncols] -= cb * tab.rhs(i);
  }
  SimplexRun p2{tab, tol, art_start, degenerate_limit, cap};
  const PhaseResult r2 = p2.run(cost, {});
  iterations += p2.iterations;
  out.iterations = iterations;
  if (r2 == PhaseResult::Unbounded) {
    out.status = Status::Unbounded;
    return out;
  }

  Vector y(ncols, 0.0);
  for (std::size_t i = 0; i < m; ++i) y[tab.basis()[i]] = std::max(tab.rhs(i), 0.0);
  out.solution.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double x = vars[j].offset + vars[j].sign * y[vars[j].pos];
    if (vars[j].neg >= 0) x -= y[static_cast<std::size_t>(vars[j].neg)];
    out.solution[j] = x;
  }
  out.objective_value = dot(lp.objective, out.solution);
  out.dual_values.assign(nc, 0.0);
  for (std::size_t i = 0; i < nc; ++i) {
    const double pi = -cost[unit_col[i]];
    out.dual_values[i] = spec[i].flipped ? -pi : pi;
  }
  out.status = Status::Optimal;
  (void)cost_offset;
  return out;
}

}  // namespace flexcert::lp
