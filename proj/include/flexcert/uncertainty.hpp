#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "flexcert/numerics.hpp"
#include "flexcert/polyhedron.hpp"

// Data-driven uncertainty sets for nodal residual demand.
//
// A polyhedral uncertainty set (PUS) is the convex hull of the 2K points
// d0 +/- S_k V_k, where V_k are the leading principal components of the
// forecast-error covariance and S_k the largest projected error magnitude
// along V_k. The rival box set takes per-node error extremes.
namespace flexcert {

struct Pus {
  Vector center;                  // d0 (MW)
  std::vector<Vector> directions;  // K orthonormal N-vectors
  Vector magnitudes;              // K positive extremal magnitudes (MW)

  std::size_t dim() const noexcept { return center.size(); }
  std::size_t components() const noexcept { return directions.size(); }
  // d0 + sign * S_k V_k
  Vector vertex(std::size_t k, double sign) const;
};

inline constexpr std::size_t kMaxPusComponents = 20;

// W - mu with each column's sample mean removed.
Matrix center_data(const Matrix& observed, const Matrix& forecast);

// Wc^T Wc / (T - 1).
Matrix covariance(const Matrix& centered);

// Z_k = Wc V_k.
Vector project_scores(const Matrix& centered, const Matrix& eigenvectors, std::size_t k);

// max_t |Z_k(t)|.
double extremal_magnitude(std::span<const double> scores);

// Number of components with eigenvalue >= 1e-9 * largest eigenvalue.
std::size_t default_component_count(std::span<const double> eigenvalues);

Pus build_pus(const Matrix& observed, const Matrix& forecast, std::size_t k, const Vector& d0);

// Same, with K chosen by default_component_count.
Pus build_pus(const Matrix& observed, const Matrix& forecast, const Vector& d0);

// H-representation with 2^K facets. When K < N the discarded directions are
// pinned by slabs |V_j . (d - d0)| <= span_tol (default 1e-6 * max S_k).
HPolyhedron pus_to_hrep(const Pus& p, std::optional<double> span_tol = std::nullopt);

struct PusMembership {
  bool inside = false;
  Vector omega_plus;   // witness weights when inside
  Vector omega_minus;
};

// Convex-combination membership decided by a feasibility LP over the weights.
PusMembership pus_contains(const Pus& p, std::span<const double> d);

// Box whose faces are the vertex coordinate ranges of the PUS.
BoxSet pus_bounding_box(const Pus& p);

// d0 + per-column min/max of the centered errors.
BoxSet box_from_data(const Matrix& observed, const Matrix& forecast, const Vector& d0);

// Fraction of centered error rows e for which d0 + e lies in the PUS
// (reported, not guaranteed to be 1).
double fraction_inside(const Pus& p, const Matrix& centered);

// One PUS per group of node indices; the overall set is their product.
struct GroupedPus {
  std::size_t dim = 0;
  std::vector<std::vector<std::size_t>> groups;
  std::vector<Pus> sets;
};

GroupedPus build_grouped_pus(const Matrix& observed, const Matrix& forecast,
                             const std::vector<std::vector<std::size_t>>& groups,
                             const Vector& d0);
HPolyhedron grouped_pus_to_hrep(const GroupedPus& g);
BoxSet grouped_pus_bounding_box(const GroupedPus& g);

// Covariance of the synthetic error model: (eta mu_n)^2 on the diagonal and
// eta^2 alpha mu_n mu_n' off it.
Matrix synth_covariance(std::span<const double> profile, double eta, double alpha);

struct SynthData {
  Matrix observed;  // W
  Matrix forecast;  // mu
};

// T rows of forecast = profile and observed = profile + Gaussian error drawn
// through the Cholesky factor of synth_covariance.
SynthData synth_generate(std::span<const double> profile, double eta, double alpha,
                         std::size_t samples, std::uint64_t seed);

}  // namespace flexcert
