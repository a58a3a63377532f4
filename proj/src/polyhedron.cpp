#include "flexcert/polyhedron.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "flexcert/error.hpp"

namespace flexcert {

HPolyhedron::HPolyhedron(Matrix a, Vector b) : dim_(a.cols()) {
  if (a.rows() != b.size())
    fail(ErrorKind::DimensionMismatch, "HPolyhedron: A has " + std::to_string(a.rows()) +
                                           " rows but b has " + std::to_string(b.size()));
  a_ = Matrix(0, dim_);
  for (std::size_t j = 0; j < a.rows(); ++j) add_row(a.row(j), b[j]);
}

void HPolyhedron::add_row(std::span<const double> coefficients, double rhs) {
  if (coefficients.size() != dim_)
    fail(ErrorKind::DimensionMismatch, "HPolyhedron::add_row: expected " +
                                           std::to_string(dim_) + " coefficients, got " +
                                           std::to_string(coefficients.size()));
  bool nonzero = false;
  for (double c : coefficients) {
    if (!std::isfinite(c)) fail(ErrorKind::NumericalBreakdown, "HPolyhedron: non-finite coefficient");
    if (c != 0.0) nonzero = true;
  }
  if (!std::isfinite(rhs)) fail(ErrorKind::NumericalBreakdown, "HPolyhedron: non-finite rhs");
  if (!nonzero) fail(ErrorKind::BadDimension, "HPolyhedron: all-zero row");
  if (a_.cols() != dim_) a_ = Matrix(0, dim_);
  a_.append_row(coefficients);
  b_.push_back(rhs);
}

double HPolyhedron::slack(std::size_t j, std::span<const double> x) const {
  return dot(a_.row(j), x) - b_[j];
}

double HPolyhedron::min_slack(std::span<const double> x) const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < num_rows(); ++j) m = std::min(m, slack(j, x));
  return m;
}

bool HPolyhedron::contains(std::span<const double> x, double tol) const {
  if (x.size() != dim_) fail(ErrorKind::DimensionMismatch, "HPolyhedron::contains: dimension");
  for (std::size_t j = 0; j < num_rows(); ++j)
    if (slack(j, x) < -tol) return false;
  return true;
}

HPolyhedron HPolyhedron::select(std::span<const std::size_t> rows) const {
  HPolyhedron out(dim_);
  for (std::size_t j : rows) out.add_row(row(j), b_[j]);
  return out;
}

HPolyhedron HPolyhedron::without_row(std::size_t j) const {
  HPolyhedron out(dim_);
  for (std::size_t k = 0; k < num_rows(); ++k)
    if (k != j) out.add_row(row(k), b_[k]);
  return out;
}

void HPolyhedron::append(const HPolyhedron& other) {
  if (other.dim() != dim_) fail(ErrorKind::DimensionMismatch, "HPolyhedron::append: dimension");
  for (std::size_t j = 0; j < other.num_rows(); ++j) add_row(other.row(j), other.rhs(j));
}

HPolyhedron HPolyhedron::embed(std::size_t total_dim, std::size_t offset) const {
  if (offset + dim_ > total_dim) fail(ErrorKind::DimensionMismatch, "HPolyhedron::embed: too small");
  HPolyhedron out(total_dim);
  Vector r(total_dim);
  for (std::size_t j = 0; j < num_rows(); ++j) {
    std::fill(r.begin(), r.end(), 0.0);
    std::copy(row(j).begin(), row(j).end(), r.begin() + static_cast<std::ptrdiff_t>(offset));
    out.add_row(r, b_[j]);
  }
  return out;
}

double BoxSet::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < dim(); ++i) v *= std::max(0.0, upper[i] - lower[i]);
  return v;
}

bool BoxSet::contains(std::span<const double> x, double tol) const {
  for (std::size_t i = 0; i < dim(); ++i)
    if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
  return true;
}

HPolyhedron BoxSet::to_hrep() const {
  const std::size_t n = dim();
  HPolyhedron out(n);
  Vector r(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = 1.0;
    out.add_row(r, lower[i]);
    r[i] = -1.0;
    out.add_row(r, -upper[i]);
    r[i] = 0.0;
  }
  return out;
}

}  // namespace flexcert
