#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "flexcert/numerics.hpp"

// Dense two-phase simplex for the small LPs of the pipeline (admissibility,
// redundancy certification, inverse-optimization subproblems).
namespace flexcert::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { GreaterEqual, LessEqual, Equal };

struct Constraint {
  Vector coefficients;
  Relation relation = Relation::GreaterEqual;
  double rhs = 0.0;
};

struct Bounds {
  double lower = 0.0;
  double upper = kInf;
};

// minimize objective . x  subject to constraints and per-variable bounds.
// Variables default to [0, +inf).
struct LinearProgram {
  Vector objective;
  std::vector<Constraint> constraints;
  std::vector<Bounds> bounds;

  LinearProgram() = default;
  explicit LinearProgram(std::size_t num_variables)
      : objective(num_variables, 0.0), bounds(num_variables) {}

  std::size_t num_variables() const noexcept { return objective.size(); }

  void add(Vector coefficients, Relation relation, double rhs) {
    constraints.push_back({std::move(coefficients), relation, rhs});
  }
  void set_free(std::size_t j) { bounds[j] = {-kInf, kInf}; }
  void set_all_free() {
    for (auto& b : bounds) b = {-kInf, kInf};
  }
};

enum class Status { Optimal, Infeasible, Unbounded };

const char* to_string(Status status);

struct LpOutcome {
  Status status = Status::Infeasible;
  Vector solution;          // Optimal only
  double objective_value = 0.0;
  // One per constraint, Lagrangian sign convention for minimization:
  // >= rows carry y >= 0, <= rows y <= 0, = rows free; objective = A^T y + z
  // where z are reduced costs of the variable bounds. For degenerate optima
  // any valid dual vector may be returned.
  Vector dual_values;
  std::size_t iterations = 0;

  bool optimal() const noexcept { return status == Status::Optimal; }
};

// All solver tolerances live here.
struct Tolerances {
  double feasibility = 1e-7;  // absolute-plus-relative on the rhs scale
  double pivot = 1e-9;
  double optimality = 1e-9;
  double breakdown = 1e-11;
};

LpOutcome solve(const LinearProgram& lp, const Tolerances& tol = {});

// Max violation of the constraints and bounds at x (0 when feasible).
double max_violation(const LinearProgram& lp, const Vector& x);

}  // namespace flexcert::lp
