#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace bakeoff {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> data() const { return data_; }

  Matrix transpose() const;
  friend Matrix operator*(const Matrix& a, const Matrix& b);
  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Sample covariance (divisor n - 1). Throws std::invalid_argument for n < 2.
Matrix covariance(const Matrix& rows);

struct EigenDecomposition {
  std::vector<double> values;  // non-increasing
  Matrix vectors;              // column i pairs with values[i]
};

/// Cyclic Jacobi rotations. Each eigenvector is signed so that its
/// largest-magnitude component is positive (first such component on ties).
/// Throws std::invalid_argument when |a - a^T| exceeds 1e-10.
EigenDecomposition symmetric_eigen(const Matrix& a);

class DegeneratePcaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Full-rank PCA rotation: all components are kept.
struct PcaModel {
  std::vector<double> means;
  Matrix components;  // f x f, orthonormal columns
  std::vector<double> eigenvalues;

  std::size_t dimension() const { return means.size(); }
  /// out = components^T (x - means)
  void transform_into(std::span<const double> x, std::span<double> out) const;

  static PcaModel identity(std::size_t f);
};

/// Throws DegeneratePcaError for fewer than two rows or no columns.
PcaModel pca_fit(const Matrix& rows);
Matrix pca_transform(const PcaModel& model, const Matrix& rows);

/// Solves a x = b for symmetric positive definite a by Cholesky.
/// Returns false if a is not numerically positive definite.
bool solve_spd(const Matrix& a, std::span<const double> b, std::span<double> x);

}  // namespace bakeoff
