#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mcov {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Small odd-shaped helper rather than a
/// full linear-algebra library: the toolkit only ever needs p x p symmetric
/// work (p <= 64) and n x p chain storage.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(const Vector& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  Matrix transposed() const;
  Vector diag() const;
  double trace() const;
  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;

  /// Max |A_ij - A_ji| over the strict upper triangle.
  double asymmetry() const;
  /// Replace A with (A + A^T)/2.
  void symmetrize();

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double c);

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, double c) { return a *= c; }
  friend Matrix operator*(double c, Matrix a) { return a *= c; }

  friend bool operator==(const Matrix& a, const Matrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, const Vector& x);

/// acc += c * x y^T
void add_scaled_outer(Matrix& acc, double c, std::span<const double> x,
                      std::span<const double> y);

double dot(std::span<const double> x, std::span<const double> y);

}  // namespace mcov
