#include "flexcert/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flexcert/error.hpp"
#include "flexcert/lp.hpp"
#include "flexcert/rng.hpp"

namespace flexcert {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorKind::ShapeMismatch, "observed is " + std::to_string(a.rows()) + "x" +
                                       std::to_string(a.cols()) + ", forecast is " +
                                       std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
}

double default_span_tol(const Pus& p) {
  double m = 0.0;
  for (double s : p.magnitudes) m = std::max(m, s);
  return 1e-6 * m;
}

// Orthonormal basis of the complement of `basis` (Gram-Schmidt on unit axes).
std::vector<Vector> orthogonal_complement(const std::vector<Vector>& basis, std::size_t n) {
  std::vector<Vector> all = basis;
  std::vector<Vector> out;
  for (std::size_t i = 0; i < n && all.size() < n; ++i) {
    Vector e(n, 0.0);
    e[i] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : all) {
        const double c = dot(q, e);
        for (std::size_t t = 0; t < n; ++t) e[t] -= c * q[t];
      }
    const double len = norm2(e);
    if (len < 1e-8) continue;
    for (double& x : e) x /= len;
    all.push_back(e);
    out.push_back(e);
  }
  return out;
}

Matrix select_columns(const Matrix& m, const std::vector<std::size_t>& cols) {
  Matrix out(m.rows(), cols.size());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = m(r, cols[c]);
  return out;
}

}  // namespace

Vector Pus::vertex(std::size_t k, double sign) const {
  Vector v = center;
  for (std::size_t n = 0; n < v.size(); ++n) v[n] += sign * magnitudes[k] * directions[k][n];
  return v;
}

Matrix center_data(const Matrix& observed, const Matrix& forecast) {
  require_same_shape(observed, forecast);
  if (observed.rows() < 2) fail(ErrorKind::TooFewSamples, "center_data: need T >= 2");
  const std::size_t t = observed.rows(), n = observed.cols();
  Matrix wc(t, n);
  for (std::size_t c = 0; c < n; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < t; ++r) {
      wc(r, c) = observed(r, c) - forecast(r, c);
      mean += wc(r, c);
    }
    mean /= static_cast<double>(t);
    for (std::size_t r = 0; r < t; ++r) wc(r, c) -= mean;
  }
  return wc;
}

Matrix covariance(const Matrix& centered) {
  if (centered.rows() < 2) fail(ErrorKind::TooFewSamples, "covariance: need T >= 2");
  const std::size_t t = centered.rows(), n = centered.cols();
  Matrix s(n, n);
  for (std::size_t r = 0; r < t; ++r)
    for (std::size_t i = 0; i < n; ++i) {
      const double wi = centered(r, i);
      for (std::size_t j = i; j < n; ++j) s(i, j) += wi * centered(r, j);
    }
  const double scale = 1.0 / static_cast<double>(t - 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) s(j, i) = s(i, j) = s(i, j) * scale;
  return s;
}

Vector project_scores(const Matrix& centered, const Matrix& eigenvectors, std::size_t k) {
  if (k >= eigenvectors.cols())
    fail(ErrorKind::IndexOutOfRange, "project_scores: component " + std::to_string(k) +
                                         " of " + std::to_string(eigenvectors.cols()));
  if (eigenvectors.rows() != centered.cols())
    fail(ErrorKind::ShapeMismatch, "project_scores: eigenvector length");
  return centered * eigenvectors.column(k);
}

double extremal_magnitude(std::span<const double> scores) {
  if (scores.empty()) fail(ErrorKind::Empty, "extremal_magnitude: empty scores");
  return norm_inf(scores);
}

std::size_t default_component_count(std::span<const double> eigenvalues) {
  if (eigenvalues.empty()) return 0;
  const double top = eigenvalues[0];
  std::size_t k = 0;
  for (double l : eigenvalues)
    if (top > 0.0 && l >= 1e-9 * top) ++k;
  return k;
}

Pus build_pus(const Matrix& observed, const Matrix& forecast, std::size_t k, const Vector& d0) {
  require_same_shape(observed, forecast);
  const std::size_t n = observed.cols();
  if (d0.size() != n) fail(ErrorKind::ShapeMismatch, "build_pus: forecast vector length");
  if (k < 1 || k > n)
    fail(ErrorKind::IndexOutOfRange, "build_pus: K=" + std::to_string(k) + " with N=" +
                                         std::to_string(n));
  if (k > kMaxPusComponents)
    fail(ErrorKind::TooManyComponents, "build_pus: K=" + std::to_string(k) + " exceeds " +
                                           std::to_string(kMaxPusComponents));
  const Matrix wc = center_data(observed, forecast);
  const EigenResult eig = sym_eigen(covariance(wc));
  Pus p;
  p.center = d0;
  for (std::size_t c = 0; c < k; ++c) {
    p.directions.push_back(eig.eigenvectors.column(c));
    p.magnitudes.push_back(extremal_magnitude(project_scores(wc, eig.eigenvectors, c)));
  }
  const double top = *std::max_element(p.magnitudes.begin(), p.magnitudes.end());
  for (std::size_t c = 0; c < k; ++c)
    if (!(p.magnitudes[c] > 1e-9 * top) || top <= 0.0)
      fail(ErrorKind::DegenerateComponent,
           "build_pus: component " + std::to_string(c) + " has magnitude " +
               std::to_string(p.magnitudes[c]) + "; lower K");
  return p;
}

Pus build_pus(const Matrix& observed, const Matrix& forecast, const Vector& d0) {
  const Matrix wc = center_data(observed, forecast);
  const EigenResult eig = sym_eigen(covariance(wc));
  const std::size_t k = std::max<std::size_t>(1, default_component_count(eig.eigenvalues));
  return build_pus(observed, forecast, k, d0);
}

HPolyhedron pus_to_hrep(const Pus& p, std::optional<double> span_tol) {
  const std::size_t n = p.dim();
  const std::size_t k = p.components();
  if (k < 1) fail(ErrorKind::IndexOutOfRange, "pus_to_hrep: no components");
  if (k > kMaxPusComponents)
    fail(ErrorKind::TooManyComponents, "pus_to_hrep: 2^K facets with K=" + std::to_string(k));
  HPolyhedron out(n);
  Vector g(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t c = 0; c < k; ++c) {
      const double sigma = (mask >> c) & 1U ? -1.0 : 1.0;
      for (std::size_t i = 0; i < n; ++i) g[i] += sigma * p.directions[c][i] / p.magnitudes[c];
    }
    // g.(d - d0) <= 1  <=>  -g.d >= -1 - g.d0
    const double rhs = -1.0 - dot(g, p.center);
    for (double& x : g) x = -x;
    out.add_row(g, rhs);
  }
  if (k < n) {
    const double tau = span_tol.value_or(default_span_tol(p));
    for (const Vector& v : orthogonal_complement(p.directions, n)) {
      const double c = dot(v, p.center);
      out.add_row(v, c - tau);
      Vector neg = v;
      for (double& x : neg) x = -x;
      out.add_row(neg, -c - tau);
    }
  }
  return out;
}

PusMembership pus_contains(const Pus& p, std::span<const double> d) {
  const std::size_t n = p.dim();
  const std::size_t k = p.components();
  if (d.size() != n) fail(ErrorKind::DimensionMismatch, "pus_contains: dimension");
  Vector delta(n);
  for (std::size_t i = 0; i < n; ++i) delta[i] = d[i] - p.center[i];

  PusMembership out;
  if (k < n) {
    Vector residual = delta;
    for (const auto& v : p.directions) {
      const double c = dot(v, delta);
      for (std::size_t i = 0; i < n; ++i) residual[i] -= c * v[i];
    }
    if (norm_inf(residual) > default_span_tol(p)) return out;
  }

  lp::LinearProgram prog(2 * k);
  for (auto& b : prog.bounds) b = {0.0, 1.0};
  prog.add(Vector(2 * k, 1.0), lp::Relation::Equal, 1.0);
  for (std::size_t c = 0; c < k; ++c) {
    Vector row(2 * k, 0.0);
    row[c] = p.magnitudes[c];
    row[k + c] = -p.magnitudes[c];
    prog.add(std::move(row), lp::Relation::Equal, dot(p.directions[c], delta));
  }
  const auto res = lp::solve(prog);
  if (!res.optimal()) return out;
  out.inside = true;
  out.omega_plus.assign(res.solution.begin(), res.solution.begin() + static_cast<std::ptrdiff_t>(k));
  out.omega_minus.assign(res.solution.begin() + static_cast<std::ptrdiff_t>(k), res.solution.end());
  return out;
}

BoxSet pus_bounding_box(const Pus& p) {
  BoxSet box{p.center, p.center};
  for (std::size_t c = 0; c < p.components(); ++c)
    for (double sign : {-1.0, 1.0}) {
      const Vector v = p.vertex(c, sign);
      for (std::size_t i = 0; i < p.dim(); ++i) {
        box.lower[i] = std::min(box.lower[i], v[i]);
        box.upper[i] = std::max(box.upper[i], v[i]);
      }
    }
  return box;
}

BoxSet box_from_data(const Matrix& observed, const Matrix& forecast, const Vector& d0) {
  const Matrix wc = center_data(observed, forecast);
  if (d0.size() != wc.cols()) fail(ErrorKind::ShapeMismatch, "box_from_data: forecast vector length");
  BoxSet box{d0, d0};
  for (std::size_t c = 0; c < wc.cols(); ++c) {
    double lo = wc(0, c), hi = wc(0, c);
    for (std::size_t r = 1; r < wc.rows(); ++r) {
      lo = std::min(lo, wc(r, c));
      hi = std::max(hi, wc(r, c));
    }
    box.lower[c] += lo;
    box.upper[c] += hi;
  }
  return box;
}

double fraction_inside(const Pus& p, const Matrix& centered) {
  const HPolyhedron h = pus_to_hrep(p);
  std::size_t inside = 0;
  Vector d(p.dim());
  for (std::size_t r = 0; r < centered.rows(); ++r) {
    for (std::size_t i = 0; i < p.dim(); ++i) d[i] = p.center[i] + centered(r, i);
    if (h.contains(d, 1e-9)) ++inside;
  }
  return centered.rows() ? static_cast<double>(inside) / static_cast<double>(centered.rows()) : 0.0;
}

GroupedPus build_grouped_pus(const Matrix& observed, const Matrix& forecast,
                             const std::vector<std::vector<std::size_t>>& groups,
                             const Vector& d0) {
  require_same_shape(observed, forecast);
  const std::size_t n = observed.cols();
  std::vector<int> seen(n, 0);
  for (const auto& g : groups) {
    if (g.empty()) fail(ErrorKind::InvalidArgument, "build_grouped_pus: empty group");
    for (std::size_t i : g) {
      if (i >= n) fail(ErrorKind::IndexOutOfRange, "build_grouped_pus: node index out of range");
      ++seen[i];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (seen[i] != 1)
      fail(ErrorKind::InvalidArgument, "build_grouped_pus: groups must partition the nodes (index " +
                                           std::to_string(i) + ")");
  GroupedPus out;
  out.dim = n;
  out.groups = groups;
  for (const auto& g : groups) {
    Vector center(g.size());
    for (std::size_t c = 0; c < g.size(); ++c) center[c] = d0[g[c]];
    out.sets.push_back(build_pus(select_columns(observed, g), select_columns(forecast, g), center));
  }
  return out;
}

HPolyhedron grouped_pus_to_hrep(const GroupedPus& g) {
  HPolyhedron out(g.dim);
  Vector row(g.dim);
  for (std::size_t s = 0; s < g.sets.size(); ++s) {
    const HPolyhedron local = pus_to_hrep(g.sets[s]);
    for (std::size_t j = 0; j < local.num_rows(); ++j) {
      std::fill(row.begin(), row.end(), 0.0);
      for (std::size_t c = 0; c < g.groups[s].size(); ++c) row[g.groups[s][c]] = local.row(j)[c];
      out.add_row(row, local.rhs(j));
    }
  }
  return out;
}

BoxSet grouped_pus_bounding_box(const GroupedPus& g) {
  BoxSet box{Vector(g.dim), Vector(g.dim)};
  for (std::size_t s = 0; s < g.sets.size(); ++s) {
    const BoxSet local = pus_bounding_box(g.sets[s]);
    for (std::size_t c = 0; c < g.groups[s].size(); ++c) {
      box.lower[g.groups[s][c]] = local.lower[c];
      box.upper[g.groups[s][c]] = local.upper[c];
    }
  }
  return box;
}

Matrix synth_covariance(std::span<const double> profile, double eta, double alpha) {
  if (!(eta >= 0.0 && eta <= 1.0)) fail(ErrorKind::InvalidArgument, "synth: eta must lie in [0,1]");
  if (!(alpha >= -1.0 && alpha <= 1.0)) fail(ErrorKind::InvalidArgument, "synth: alpha must lie in [-1,1]");
  const std::size_t n = profile.size();
  if (n == 0) fail(ErrorKind::Empty, "synth: empty profile");
  for (double m : profile)
    if (!(m > 0.0)) fail(ErrorKind::InvalidArgument, "synth: profile entries must be positive");
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      s(i, j) = i == j ? (eta * profile[i]) * (eta * profile[i]) : eta * eta * alpha * profile[i] * profile[j];
  return s;
}

SynthData synth_generate(std::span<const double> profile, double eta, double alpha,
                         std::size_t samples, std::uint64_t seed) {
  const Matrix sigma = synth_covariance(profile, eta, alpha);
  const std::size_t n = profile.size();
  if (samples == 0) fail(ErrorKind::TooFewSamples, "synth: T must be positive");
  const Matrix l = cholesky(sigma);
  SynthData out{Matrix(samples, n), Matrix(samples, n)};
  Rng rng(seed);
  Vector z(n);
  for (std::size_t t = 0; t < samples; ++t) {
    for (double& v : z) v = rng.normal();
    for (std::size_t i = 0; i < n; ++i) {
      double e = 0.0;
      for (std::size_t j = 0; j <= i; ++j) e += l(i, j) * z[j];
      out.forecast(t, i) = profile[i];
      out.observed(t, i) = profile[i] + e;
    }
  }
  return out;
}

}  // namespace flexcert
