#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "flexcert/polyhedron.hpp"

// Projection of the generation-demand polytope onto demand space by
// Fourier-Motzkin elimination, with LP-certified redundancy removal after
// every step, and Monte Carlo volume estimates.
namespace flexcert {

// Exact projection of p along coordinate `var`. An equality (an opposing row
// pair) that involves `var` is used for substitution; otherwise every
// (positive, negative) coefficient pair is combined. Combined rows are scaled
// to unit max-abs coefficient. Rows reduced to 0 >= b are dropped when b <= 0
// and raise InfeasibleInput otherwise.
HPolyhedron fme_eliminate(const HPolyhedron& p, std::size_t var);

// True iff row j is implied by the other rows: min a_j.x over them is
// >= b_j - 1e-7 (1 + |b_j|), or they are infeasible.
bool is_redundant(const HPolyhedron& p, std::size_t j);

// Same feasible set with no redundant row; surviving rows keep their order.
// Throws InfeasibleInput for an empty polyhedron.
HPolyhedron remove_redundant(const HPolyhedron& p);

struct ProjectionStage {
  std::string label;
  std::size_t rows = 0;
};

struct ProjectionReport {
  std::vector<ProjectionStage> stages;  // "input" first, then one per elimination
  std::vector<std::size_t> eliminated_vars;
  HPolyhedron final;
};

struct ProjectionOptions {
  std::size_t max_rows = 100000;
  std::vector<std::string> var_names;  // optional, for stage labels
};

// Eliminates `vars` (indices into gd) in the given order, removing redundancy
// after each step. Throws RowExplosion when an intermediate exceeds max_rows.
ProjectionReport project_loadability(const HPolyhedron& gd, std::span<const std::size_t> vars,
                                     const ProjectionOptions& options = {});

// Existence oracle: is there a value for the `hidden` coordinates of p such
// that, with the remaining coordinates set to `visible` (in index order), the
// point lies in p? Decided by a feasibility LP.
bool lift_feasible(const HPolyhedron& p, std::span<const std::size_t> hidden,
                   std::span<const double> visible);

struct VolumeEstimate {
  double volume = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  std::size_t hits = 0;
};

// Hit-or-miss estimate inside bbox, which must contain p (not checked).
// Samples are drawn in fixed-size chunks, chunk k from substream k of `seed`,
// so the estimate does not depend on the worker count.
VolumeEstimate mc_volume(const HPolyhedron& p, const BoxSet& bbox, std::size_t samples,
                         std::uint64_t seed);

}  // namespace flexcert
