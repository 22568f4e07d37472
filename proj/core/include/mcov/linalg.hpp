#pragma once

#include "mcov/matrix.hpp"

namespace mcov {

/// Eigenvalues sorted descending; eigenvectors are the matching orthonormal
/// columns. Ties keep the descending-value order with stable column order.
struct EigenDecomposition {
  Vector eigenvalues;
  Matrix eigenvectors;
};

/// Symmetric eigendecomposition by cyclic Jacobi sweeps (p <= 64 regime).
/// Input must be symmetric to 1e-8 relative; it is symmetrized internally.
/// Throws NumericError if the off-diagonal norm has not converged after the
/// sweep cap (the message carries the residual).
EigenDecomposition sym_eigen(const Matrix& a);

/// Lower-triangular L with L L^T = A for symmetric positive definite A.
/// Throws NumericError carrying the pivot index on a non-positive pivot.
Matrix cholesky(const Matrix& a);

/// 2 * sum(log L_ii): log-determinant of A from its Cholesky factor.
double chol_logdet(const Matrix& chol_lower);

/// Solve A x = b given the Cholesky factor of A (forward + back substitution).
Vector chol_solve(const Matrix& chol_lower, const Vector& b);

/// Solve L y = b (forward substitution only).
Vector forward_solve(const Matrix& chol_lower, const Vector& b);

/// Solve the square system A X = B by LU with partial pivoting.
/// Throws NumericError on a singular pivot.
Matrix lu_solve(Matrix a, Matrix b);

/// Spectral radius estimate: exact (via sym_eigen) for symmetric input, power
/// iteration otherwise.
double spectral_radius(const Matrix& a);

}  // namespace mcov
