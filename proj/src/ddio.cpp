#include "flexcert/ddio.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "flexcert/error.hpp"
#include "flexcert/loadability.hpp"
#include "flexcert/lp.hpp"
#include "flexcert/parallel.hpp"
#include "flexcert/rng.hpp"

namespace flexcert {

namespace {

constexpr double kTieTol = 1e-9;
constexpr double kViolationTol = 1e-9;
constexpr double kBoundaryTol = 1e-7;
constexpr double kDegenerateMean = 1e-12;

void check_point(const HPolyhedron& d, std::span<const double> d0, const char* who) {
  if (d0.size() != d.dim())
    fail(ErrorKind::DimensionMismatch, std::string(who) + ": point has " +
                                           std::to_string(d0.size()) + " entries, set has dimension " +
                                           std::to_string(d.dim()));
  if (d.num_rows() == 0) fail(ErrorKind::Empty, std::string(who) + ": set has no rows");
}

void check_minimal(const HPolyhedron& d, const AssessOptions& options) {
  if (d.num_rows() < 2) return;
  std::vector<std::size_t> rows(d.num_rows());
  std::iota(rows.begin(), rows.end(), 0);
  if (!options.full_minimality_check) {
    // Partial Fisher-Yates: the first `spot_checks` entries are a random sample.
    Rng rng(options.seed);
    const std::size_t k = std::min(options.spot_checks, rows.size());
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t pick = i + rng.next_u64() % (rows.size() - i);
      std::swap(rows[i], rows[pick]);
    }
    rows.resize(k);
  }
  std::vector<char> redundant(rows.size(), 0);
  parallel_for(rows.size(), [&](std::size_t i) { redundant[i] = is_redundant(d, rows[i]); });
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (redundant[i])
      fail(ErrorKind::NotMinimal, "row " + std::to_string(rows[i]) +
                                      " is redundant; remove redundancy before assessing");
}

}  // namespace

const char* to_string(Norm r) { return r == Norm::One ? "1" : "inf"; }

Norm parse_norm(const std::string& text) {
  if (text == "1") return Norm::One;
  if (text == "inf" || text == "infinity") return Norm::Inf;
  fail(ErrorKind::InvalidArgument, "norm must be \"1\" or \"inf\", got \"" + text + "\"");
}

const char* to_string(Classification c) {
  switch (c) {
    case Classification::Interior: return "interior";
    case Classification::Boundary: return "boundary";
    case Classification::Exterior: return "exterior";
  }
  return "?";
}

Subproblem ddio_subproblem(const HPolyhedron& d, std::span<const double> d0, std::size_t j,
                           Norm r) {
  check_point(d, d0, "ddio_subproblem");
  if (j >= d.num_rows()) fail(ErrorKind::IndexOutOfRange, "ddio_subproblem: row index");
  const std::size_t n = d.dim();
  using lp::Relation;

  // Rows are written on the perturbation only: -a.s >= b - a.d0.
  lp::LinearProgram prog;
  if (r == Norm::One) {
    prog = lp::LinearProgram(2 * n);  // s+ | s-
    std::fill(prog.objective.begin(), prog.objective.end(), 1.0);
  } else {
    prog = lp::LinearProgram(n + 1);  // s | t
    for (std::size_t k = 0; k < n; ++k) prog.set_free(k);
    prog.objective[n] = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      Vector row(n + 1, 0.0);
      row[n] = 1.0;
      row[k] = -1.0;
      prog.add(row, Relation::GreaterEqual, 0.0);
      row[k] = 1.0;
      prog.add(row, Relation::GreaterEqual, 0.0);
    }
  }
  for (std::size_t k = 0; k < d.num_rows(); ++k) {
    const auto a = d.row(k);
    Vector row(prog.num_variables(), 0.0);
    for (std::size_t c = 0; c < n; ++c) {
      row[c] = -a[c];
      if (r == Norm::One) row[n + c] = a[c];
    }
    prog.add(std::move(row), k == j ? Relation::Equal : Relation::GreaterEqual,
             d.rhs(k) - dot(a, d0));
  }

  const lp::LpOutcome out = lp::solve(prog);
  if (out.status != lp::Status::Optimal)
    fail(ErrorKind::SubproblemInfeasible, "ddio_subproblem: row " + std::to_string(j) +
                                              " is not reachable inside the set (" +
                                              lp::to_string(out.status) + ")");
  Subproblem sp;
  sp.s.resize(n);
  for (std::size_t c = 0; c < n; ++c)
    sp.s[c] = r == Norm::One ? out.solution[c] - out.solution[n + c] : out.solution[c];
  sp.distance = r == Norm::One ? norm1(sp.s) : norm_inf(sp.s);
  return sp;
}

DdioResult ddio_assess(const HPolyhedron& d, std::span<const double> d0,
                       const AssessOptions& options) {
  check_point(d, d0, "ddio_assess");
  check_minimal(d, options);
  const std::size_t rows = d.num_rows();

  DdioResult res;
  res.norm = options.norm;
  res.s.resize(rows);
  res.distances.resize(rows);
  parallel_for(rows, [&](std::size_t j) {
    Subproblem sp = ddio_subproblem(d, d0, j, options.norm);
    res.s[j] = std::move(sp.s);
    res.distances[j] = sp.distance;
  });

  res.min_distance = *std::min_element(res.distances.begin(), res.distances.end());
  double sum = 0.0;
  for (double v : res.distances) sum += v;
  res.mean_distance = sum / static_cast<double>(rows);
  for (std::size_t j = 0; j < rows; ++j)
    if (res.distances[j] <= res.min_distance + kTieTol * (1.0 + res.min_distance))
      res.j_star.push_back(j);
  if (res.mean_distance <= kDegenerateMean) {
    res.degenerate = true;
    res.rho = 0.0;
  } else {
    res.rho = 1.0 - res.min_distance / res.mean_distance;
  }

  for (std::size_t j = 0; j < rows; ++j) {
    if (d.slack(j, d0) >= -kViolationTol) continue;
    res.violated.push_back(j);
    for (double v : res.s[j]) {
      res.rdc += v;
      (v > 0.0 ? res.rdc_shed : res.rdc_curtail) += v;
    }
  }
  if (!res.violated.empty())
    res.classification = Classification::Exterior;
  else if (res.min_distance <= kBoundaryTol)
    res.classification = Classification::Boundary;
  else
    res.classification = Classification::Interior;
  return res;
}

InverseCertificate recover_certificate(const HPolyhedron& d, std::span<const double> d0,
                                       const DdioResult& result) {
  check_point(d, d0, "recover_certificate");
  if (result.j_star.empty() || result.s.size() != d.num_rows())
    fail(ErrorKind::InvalidArgument, "recover_certificate: result does not match the set");
  InverseCertificate cert;
  cert.row = result.j_star.front();
  const auto a = d.row(cert.row);
  const double scale = norm1(a);
  cert.c.resize(d.dim());
  for (std::size_t k = 0; k < d.dim(); ++k) cert.c[k] = a[k] / scale;
  cert.y.assign(d.num_rows(), 0.0);
  cert.y[cert.row] = 1.0 / scale;
  cert.s = result.s[cert.row];

  Vector x(d.dim());
  for (std::size_t k = 0; k < d.dim(); ++k) x[k] = d0[k] - cert.s[k];
  const double primal = dot(cert.c, x);
  const double dual = d.rhs(cert.row) / scale;
  if (std::abs(primal - dual) > 1e-6 * (1.0 + std::abs(dual)) || d.min_slack(x) < -1e-7)
    fail(ErrorKind::Internal, "recover_certificate: perturbed point is not optimal");
  return cert;
}

std::vector<SweepPoint> rho_sweep(const HPolyhedron& d, const std::vector<Vector>& grid,
                                  const AssessOptions& options) {
  std::vector<SweepPoint> out;
  out.reserve(grid.size());
  AssessOptions opt = options;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    // Minimality needs certifying once, not per point.
    if (i == 1) {
      opt.spot_checks = 0;
      opt.full_minimality_check = false;
    }
    const DdioResult r = ddio_assess(d, grid[i], opt);
    out.push_back({grid[i], r.rho, r.rdc, r.classification});
  }
  return out;
}

ChebyshevCenter chebyshev_center(const HPolyhedron& d, Norm ball) {
  const std::size_t n = d.dim();
  lp::LinearProgram prog(n + 1);
  for (std::size_t k = 0; k < n; ++k) prog.set_free(k);
  prog.objective[n] = -1.0;
  for (std::size_t j = 0; j < d.num_rows(); ++j) {
    const auto a = d.row(j);
    Vector row(a.begin(), a.end());
    // A ball in norm r fits iff a.c - ||a||_dual R >= b.
    row.push_back(-(ball == Norm::Inf ? norm1(a) : norm_inf(a)));
    prog.add(std::move(row), lp::Relation::GreaterEqual, d.rhs(j));
  }
  const lp::LpOutcome out = lp::solve(prog);
  if (out.status == lp::Status::Infeasible)
    fail(ErrorKind::InfeasibleInput, "chebyshev_center: set is empty");
  if (out.status == lp::Status::Unbounded)
    fail(ErrorKind::InvalidArgument, "chebyshev_center: set contains arbitrarily large balls");
  return {Vector(out.solution.begin(), out.solution.begin() + static_cast<std::ptrdiff_t>(n)),
          out.solution[n]};
}

}  // namespace flexcert
