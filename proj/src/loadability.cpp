#include "flexcert/loadability.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <map>
#include <optional>

#include "flexcert/error.hpp"
#include "flexcert/lp.hpp"
#include "flexcert/parallel.hpp"
#include "flexcert/rng.hpp"

namespace flexcert {

namespace {

constexpr double kCancel = 1e-12;     // relative cancellation threshold in combinations
constexpr double kTrivialRhs = 1e-9;  // 0 >= b accepted when b <= this (scaled)
constexpr double kRedundancyTol = 1e-7;
constexpr double kEqualityTol = 1e-12;
constexpr std::size_t kVolumeChunk = 8192;

struct Row {
  Vector a;
  double b = 0.0;
};

double max_abs(std::span<const double> v) { return norm_inf(v); }

// lambda_p * p + lambda_n * n with `var` cancelled exactly. Returns nullopt for
// a trivially true row.
std::optional<Row> combine(std::span<const double> pa, double pb, double lp,
                           std::span<const double> na, double nb, double ln, std::size_t var) {
  Row r{Vector(pa.size()), lp * pb + ln * nb};
  double scale_b = std::abs(lp * pb) + std::abs(ln * nb);
  for (std::size_t k = 0; k < pa.size(); ++k) {
    if (k == var) continue;
    const double v = lp * pa[k] + ln * na[k];
    const double mag = std::abs(lp * pa[k]) + std::abs(ln * na[k]);
    r.a[k] = std::abs(v) <= kCancel * mag ? 0.0 : v;
  }
  const double m = max_abs(r.a);
  if (m == 0.0) {
    if (r.b <= kTrivialRhs * (1.0 + scale_b)) return std::nullopt;
    fail(ErrorKind::InfeasibleInput, "elimination produced 0 >= " + std::to_string(r.b));
  }
  for (double& v : r.a) v /= m;
  r.b /= m;
  return r;
}

// Index of a row k != j with a_k = -a_j and b_k = -b_j (after scaling), if any.
std::optional<std::size_t> opposing_row(const HPolyhedron& p, std::size_t j) {
  const auto aj = p.row(j);
  const double sj = max_abs(aj);
  for (std::size_t k = 0; k < p.num_rows(); ++k) {
    if (k == j) continue;
    const auto ak = p.row(k);
    const double sk = max_abs(ak);
    bool match = std::abs(p.rhs(j) / sj + p.rhs(k) / sk) <= kEqualityTol * (1.0 + std::abs(p.rhs(j) / sj));
    for (std::size_t c = 0; match && c < aj.size(); ++c)
      match = std::abs(aj[c] / sj + ak[c] / sk) <= kEqualityTol;
    if (match) return k;
  }
  return std::nullopt;
}

HPolyhedron drop_column(const std::vector<Row>& rows, std::size_t dim, std::size_t var) {
  HPolyhedron out(dim - 1);
  Vector reduced(dim - 1);
  for (const Row& r : rows) {
    for (std::size_t k = 0, c = 0; k < dim; ++k)
      if (k != var) reduced[c++] = r.a[k];
    out.add_row(reduced, r.b);
  }
  return out;
}

lp::LinearProgram rows_lp(const HPolyhedron& p, std::span<const std::size_t> rows) {
  lp::LinearProgram prog(p.dim());
  prog.set_all_free();
  for (std::size_t j : rows) {
    const auto a = p.row(j);
    prog.add(Vector(a.begin(), a.end()), lp::Relation::GreaterEqual, p.rhs(j));
  }
  return prog;
}

// Redundancy of row j against the rows listed in `others`.
bool redundant_against(const HPolyhedron& p, std::size_t j, std::span<const std::size_t> others) {
  lp::LinearProgram prog = rows_lp(p, others);
  const auto a = p.row(j);
  prog.objective.assign(a.begin(), a.end());
  const lp::LpOutcome out = lp::solve(prog);
  if (out.status == lp::Status::Infeasible) return true;
  if (out.status == lp::Status::Unbounded) return false;
  return out.objective_value >= p.rhs(j) - kRedundancyTol * (1.0 + std::abs(p.rhs(j)));
}

}  // namespace

HPolyhedron fme_eliminate(const HPolyhedron& p, std::size_t var) {
  const std::size_t dim = p.dim();
  if (var >= dim)
    fail(ErrorKind::IndexOutOfRange, "fme_eliminate: variable " + std::to_string(var) +
                                         " out of range for dimension " + std::to_string(dim));
  std::vector<Row> out;
  auto keep = [&](std::size_t j) {
    const auto a = p.row(j);
    out.push_back({Vector(a.begin(), a.end()), p.rhs(j)});
  };

  // Prefer substitution through an equality involving var (largest pivot).
  std::optional<std::size_t> eq;
  std::optional<std::size_t> eq_partner;
  double best = 0.0;
  for (std::size_t j = 0; j < p.num_rows(); ++j) {
    const double c = std::abs(p.row(j)[var]) / max_abs(p.row(j));
    if (c <= best) continue;
    if (auto k = opposing_row(p, j)) {
      eq = j;
      eq_partner = *k;
      best = c;
    }
  }

  if (eq) {
    const auto ea = p.row(*eq);
    const double ev = ea[var];
    for (std::size_t j = 0; j < p.num_rows(); ++j) {
      if (j == *eq || j == *eq_partner) continue;
      const double c = p.row(j)[var];
      if (c == 0.0) {
        keep(j);
        continue;
      }
      // row_j - (c / ev) * equality; the sign of the multiplier is free.
      if (auto r = combine(p.row(j), p.rhs(j), 1.0, ea, p.rhs(*eq), -c / ev, var))
        out.push_back(std::move(*r));
    }
    return drop_column(out, dim, var);
  }

  std::vector<std::size_t> pos, neg;
  for (std::size_t j = 0; j < p.num_rows(); ++j) {
    const double c = p.row(j)[var];
    if (c > 0.0)
      pos.push_back(j);
    else if (c < 0.0)
      neg.push_back(j);
    else
      keep(j);
  }
  for (std::size_t i : pos)
    for (std::size_t k : neg) {
      const double ci = p.row(i)[var], ck = -p.row(k)[var];
      if (auto r = combine(p.row(i), p.rhs(i), ck, p.row(k), p.rhs(k), ci, var))
        out.push_back(std::move(*r));
    }
  return drop_column(out, dim, var);
}

bool is_redundant(const HPolyhedron& p, std::size_t j) {
  if (j >= p.num_rows()) fail(ErrorKind::IndexOutOfRange, "is_redundant: row index");
  std::vector<std::size_t> others;
  for (std::size_t k = 0; k < p.num_rows(); ++k)
    if (k != j) others.push_back(k);
  return redundant_against(p, j, others);
}

HPolyhedron remove_redundant(const HPolyhedron& p) {
  if (p.num_rows() == 0) return p;
  {
    std::vector<std::size_t> all(p.num_rows());
    for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
    if (lp::solve(rows_lp(p, all)).status == lp::Status::Infeasible)
      fail(ErrorKind::InfeasibleInput, "remove_redundant: polyhedron is empty");
  }

  // Parallel rows: only the tightest survives (first one on exact ties).
  std::map<std::vector<long long>, std::size_t> tightest;
  std::vector<bool> alive(p.num_rows(), false);
  for (std::size_t j = 0; j < p.num_rows(); ++j) {
    const auto a = p.row(j);
    const double s = max_abs(a);
    std::vector<long long> key(a.size());
    for (std::size_t c = 0; c < a.size(); ++c) key[c] = std::llround(a[c] / s * 1e12);
    auto [it, inserted] = tightest.try_emplace(key, j);
    if (inserted) {
      alive[j] = true;
      continue;
    }
    const std::size_t k = it->second;
    if (p.rhs(j) / s > p.rhs(k) / max_abs(p.row(k))) {
      alive[k] = false;
      alive[j] = true;
      it->second = j;
    }
  }
  std::vector<std::size_t> rows;
  for (std::size_t j = 0; j < p.num_rows(); ++j)
    if (alive[j]) rows.push_back(j);

  // A row that is irredundant against all others stays so after any removal,
  // so the first pass runs in parallel; only flagged rows are rechecked.
  std::vector<char> flagged(rows.size(), 0);
  parallel_for(rows.size(), [&](std::size_t i) {
    std::vector<std::size_t> others;
    others.reserve(rows.size() - 1);
    for (std::size_t k = 0; k < rows.size(); ++k)
      if (k != i) others.push_back(rows[k]);
    flagged[i] = redundant_against(p, rows[i], others) ? 1 : 0;
  });
  std::vector<bool> removed(rows.size(), false);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!flagged[i]) continue;
    std::vector<std::size_t> others;
    for (std::size_t k = 0; k < rows.size(); ++k)
      if (k != i && !removed[k]) others.push_back(rows[k]);
    removed[i] = redundant_against(p, rows[i], others);
  }
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (!removed[i]) kept.push_back(rows[i]);
  return p.select(kept);
}

ProjectionReport project_loadability(const HPolyhedron& gd, std::span<const std::size_t> vars,
                                     const ProjectionOptions& options) {
  std::vector<std::size_t> current(gd.dim());
  for (std::size_t k = 0; k < current.size(); ++k) current[k] = k;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (vars[i] >= gd.dim()) fail(ErrorKind::IndexOutOfRange, "project_loadability: variable index");
    for (std::size_t k = 0; k < i; ++k)
      if (vars[k] == vars[i]) fail(ErrorKind::InvalidArgument, "project_loadability: repeated variable");
  }
  if (!options.var_names.empty() && options.var_names.size() != gd.dim())
    fail(ErrorKind::InvalidArgument, "project_loadability: var_names size");

  ProjectionReport report;
  report.stages.push_back({"input", gd.num_rows()});
  HPolyhedron p = remove_redundant(gd);
  for (std::size_t v : vars) {
    const auto at = std::find(current.begin(), current.end(), v);
    const std::size_t pos = static_cast<std::size_t>(at - current.begin());
    p = fme_eliminate(p, pos);
    if (p.num_rows() > options.max_rows)
      fail(ErrorKind::RowExplosion, "eliminating variable " + std::to_string(v) + " produced " +
                                        std::to_string(p.num_rows()) + " rows");
    current.erase(at);
    p = remove_redundant(p);
    const std::string name =
        options.var_names.empty() ? "x" + std::to_string(v) : options.var_names[v];
    report.stages.push_back({"eliminate " + name, p.num_rows()});
    report.eliminated_vars.push_back(v);
  }
  report.final = std::move(p);
  return report;
}

bool lift_feasible(const HPolyhedron& p, std::span<const std::size_t> hidden,
                   std::span<const double> visible) {
  if (hidden.size() + visible.size() != p.dim())
    fail(ErrorKind::DimensionMismatch, "lift_feasible: dimension");
  std::vector<int> slot(p.dim(), -1);
  for (std::size_t i = 0; i < hidden.size(); ++i) slot[hidden[i]] = static_cast<int>(i);
  lp::LinearProgram prog(hidden.size());
  prog.set_all_free();
  for (std::size_t j = 0; j < p.num_rows(); ++j) {
    Vector a(hidden.size(), 0.0);
    double rhs = p.rhs(j);
    for (std::size_t k = 0, v = 0; k < p.dim(); ++k) {
      if (slot[k] >= 0)
        a[static_cast<std::size_t>(slot[k])] = p.row(j)[k];
      else
        rhs -= p.row(j)[k] * visible[v++];
    }
    if (norm_inf(a) == 0.0) {
      if (rhs > 1e-9 * (1.0 + std::abs(p.rhs(j)))) return false;
      continue;
    }
    prog.add(std::move(a), lp::Relation::GreaterEqual, rhs);
  }
  return lp::solve(prog).status == lp::Status::Optimal;
}

VolumeEstimate mc_volume(const HPolyhedron& p, const BoxSet& bbox, std::size_t samples,
                         std::uint64_t seed) {
  if (bbox.dim() != p.dim()) fail(ErrorKind::DimensionMismatch, "mc_volume: box dimension");
  if (bbox.dim() == 0 || !(bbox.volume() > 0.0))
    fail(ErrorKind::EmptyBox, "mc_volume: bounding box has zero volume");
  if (samples == 0) fail(ErrorKind::InvalidArgument, "mc_volume: zero samples");
  const std::size_t chunks = (samples + kVolumeChunk - 1) / kVolumeChunk;
  std::vector<std::size_t> hits(chunks, 0);
  parallel_for(chunks, [&](std::size_t c) {
    Rng rng(Rng::substream_seed(seed, c));
    const std::size_t count = std::min(kVolumeChunk, samples - c * kVolumeChunk);
    Vector x(p.dim());
    std::size_t h = 0;
    for (std::size_t s = 0; s < count; ++s) {
      for (std::size_t k = 0; k < x.size(); ++k) x[k] = rng.uniform(bbox.lower[k], bbox.upper[k]);
      if (p.contains(x, 0.0)) ++h;
    }
    hits[c] = h;
  });
  VolumeEstimate e;
  e.samples = samples;
  for (std::size_t h : hits) e.hits += h;
  const double frac = static_cast<double>(e.hits) / static_cast<double>(samples);
  const double v = bbox.volume();
  e.volume = v * frac;
  e.std_error = v * std::sqrt(frac * (1.0 - frac) / static_cast<double>(samples));
  return e;
}

}  // namespace flexcert
