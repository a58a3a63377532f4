#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "flexcert/numerics.hpp"

namespace flexcert {

// H-representation {x | A x >= b}.
class HPolyhedron {
 public:
  HPolyhedron() = default;
  explicit HPolyhedron(std::size_t dim) : a_(0, dim), dim_(dim) {}
  HPolyhedron(Matrix a, Vector b);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t num_rows() const noexcept { return b_.size(); }

  const Matrix& a() const noexcept { return a_; }
  const Vector& b() const noexcept { return b_; }
  std::span<const double> row(std::size_t j) const { return a_.row(j); }
  double rhs(std::size_t j) const { return b_[j]; }

  // Rejects all-zero and non-finite rows.
  void add_row(std::span<const double> coefficients, double rhs);

  // a_j . x - b_j; negative means row j is violated.
  double slack(std::size_t j, std::span<const double> x) const;
  double min_slack(std::span<const double> x) const;
  bool contains(std::span<const double> x, double tol = 1e-9) const;

  // Subset of rows, in the given order.
  HPolyhedron select(std::span<const std::size_t> rows) const;
  HPolyhedron without_row(std::size_t j) const;

  // Appends rows of `other` (same dimension).
  void append(const HPolyhedron& other);

  // Embeds into a larger space: column k of this polyhedron becomes column
  // `offset + k` of a `total_dim` space.
  HPolyhedron embed(std::size_t total_dim, std::size_t offset) const;

 private:
  Matrix a_;
  Vector b_;
  std::size_t dim_ = 0;
};

// Axis-aligned box [lower, upper].
struct BoxSet {
  Vector lower;
  Vector upper;

  std::size_t dim() const noexcept { return lower.size(); }
  double volume() const;
  bool contains(std::span<const double> x, double tol = 1e-9) const;
  HPolyhedron to_hrep() const;
};

}  // namespace flexcert
