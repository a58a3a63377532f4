#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace flexcert {

using Vector = std::vector<double>;

// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<Vector>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  Vector column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const double> values);

  // Appends a row; the first row appended to an empty 0x0 matrix fixes cols.
  void append_row(std::span<const double> values);

  Matrix transpose() const;
  double max_abs() const;

  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);
Matrix operator-(const Matrix& a, const Matrix& b);

double dot(std::span<const double> a, std::span<const double> b);
double norm1(std::span<const double> v);
double norm2(std::span<const double> v);
double norm_inf(std::span<const double> v);

struct EigenResult {
  Vector eigenvalues;   // descending
  Matrix eigenvectors;  // column k pairs with eigenvalues[k]
};

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Each eigenvector is
// signed so that its largest-magnitude component is positive.
EigenResult sym_eigen(const Matrix& s);

// Lower-triangular L with L L^T = S for symmetric positive semidefinite S.
Matrix cholesky(const Matrix& s);

// Solves A x = b by Gaussian elimination with partial pivoting. Throws
// NumericalBreakdown when A is singular to working precision.
Vector solve_linear(Matrix a, Vector b);

}  // namespace flexcert
