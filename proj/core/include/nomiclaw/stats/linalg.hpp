#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace nomiclaw::stats {

struct SingularMatrix : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Small dense row-major matrix; sized for design matrices of a few
/// thousand rows by a couple dozen columns.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  const std::vector<double>& data() const { return data_; }

  static Matrix identity(std::size_t n);
  Matrix transposed() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

Matrix multiply(const Matrix& a, const Matrix& b);
std::vector<double> multiply(const Matrix& a, const std::vector<double>& v);

/// Solves A x = b by Gauss-Jordan with partial pivoting. Throws
/// SingularMatrix when a pivot collapses.
std::vector<double> solve(Matrix a, std::vector<double> b);

/// Inverse via Gauss-Jordan with partial pivoting.
Matrix inverse(Matrix a);

struct EigenSym {
  std::vector<double> values;  // descending
  Matrix vectors;              // column i pairs with values[i]
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix; eigenvalues
/// sorted descending, eigenvectors orthonormal columns.
EigenSym eigen_symmetric(Matrix a);

}  // namespace nomiclaw::stats
