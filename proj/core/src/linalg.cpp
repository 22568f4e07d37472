#include "mcov/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mcov/errors.hpp"

namespace mcov {

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

EigenDecomposition sym_eigen(const Matrix& a_in) {
  const std::size_t p = a_in.rows();
  if (p != a_in.cols()) throw NumericError("sym_eigen: matrix not square");
  double scale = a_in.max_abs();
  if (scale > 0.0 && a_in.asymmetry() > 1e-8 * scale)
    throw NumericError("sym_eigen: input not symmetric to 1e-8 relative");

  Matrix a = a_in;
  a.symmetrize();
  Matrix q = Matrix::identity(p);

  const double norm = a.frobenius_norm();
  const double tol = (norm > 0.0 ? norm : 1.0) * 1e-15;
  const int max_sweeps = 30;

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    if (off_diagonal_norm(a) <= tol) break;
    for (std::size_t i = 0; i + 1 < p; ++i) {
      for (std::size_t j = i + 1; j < p; ++j) {
        double apq = a(i, j);
        if (apq == 0.0) continue;
        double app = a(i, i);
        double aqq = a(j, j);
        double theta = 0.5 * (aqq - app) / apq;
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;

        for (std::size_t k = 0; k < p; ++k) {
          double aki = a(k, i);
          double akj = a(k, j);
          a(k, i) = c * aki - s * akj;
          a(k, j) = s * aki + c * akj;
        }
        for (std::size_t k = 0; k < p; ++k) {
          double aik = a(i, k);
          double ajk = a(j, k);
          a(i, k) = c * aik - s * ajk;
          a(j, k) = s * aik + c * ajk;
        }
        for (std::size_t k = 0; k < p; ++k) {
          double qki = q(k, i);
          double qkj = q(k, j);
          q(k, i) = c * qki - s * qkj;
          q(k, j) = s * qki + c * qkj;
        }
      }
    }
  }
  double residual = off_diagonal_norm(a);
  if (sweep == max_sweeps && residual > tol)
    throw NumericError("sym_eigen: no convergence after 30 sweeps, off-diagonal residual " +
                       std::to_string(residual));

  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

  EigenDecomposition dec;
  dec.eigenvalues.resize(p);
  dec.eigenvectors = Matrix(p, p);
  for (std::size_t k = 0; k < p; ++k) {
    dec.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < p; ++r) dec.eigenvectors(r, k) = q(r, order[k]);
  }
  return dec;
}

Matrix cholesky(const Matrix& a) {
  const std::size_t p = a.rows();
  if (p != a.cols()) throw NumericError("cholesky: matrix not square");
  Matrix l(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0))
      throw NumericError("cholesky: non-positive pivot " + std::to_string(j + 1) + " of " +
                         std::to_string(p));
    double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < p; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

double chol_logdet(const Matrix& chol_lower) {
  double s = 0.0;
  for (std::size_t i = 0; i < chol_lower.rows(); ++i) s += std::log(chol_lower(i, i));
  return 2.0 * s;
}

Vector forward_solve(const Matrix& l, const Vector& b) {
  const std::size_t p = b.size();
  Vector y(p);
  for (std::size_t i = 0; i < p; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  return y;
}

Vector chol_solve(const Matrix& l, const Vector& b) {
  const std::size_t p = b.size();
  Vector y = forward_solve(l, b);
  Vector x(p);
  for (std::size_t ii = p; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < p; ++k) s -= l(k, ii) * x[k];
    x[ii] = s / l(ii, ii);
  }
  return x;
}

Matrix lu_solve(Matrix a, Matrix b) {
  const std::size_t n = a.rows();
  if (n != a.cols() || b.rows() != n) throw NumericError("lu_solve: shape mismatch");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      double v = std::abs(a(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0) throw NumericError("lu_solve: singular matrix at pivot " + std::to_string(k));
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(k, j), b(piv, j));
    }
    double akk = a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      double f = a(i, k) / akk;
      if (f == 0.0) continue;
      a(i, k) = f;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
      for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= f * b(k, j);
    }
  }
  // Back substitution on every right-hand side.
  for (std::size_t jj = 0; jj < b.cols(); ++jj) {
    for (std::size_t ii = n; ii-- > 0;) {
      double s = b(ii, jj);
      for (std::size_t k = ii + 1; k < n; ++k) s -= a(ii, k) * b(k, jj);
      b(ii, jj) = s / a(ii, ii);
    }
  }
  return b;
}

double spectral_radius(const Matrix& a) {
  const std::size_t p = a.rows();
  double scale = a.max_abs();
  if (scale == 0.0) return 0.0;
  if (a.asymmetry() <= 1e-12 * scale) {
    auto dec = sym_eigen(a);
    double r = 0.0;
    for (double v : dec.eigenvalues) r = std::max(r, std::abs(v));
    return r;
  }
  // Power iteration with a deterministic start; the radius is estimated from
  // the geometric mean of the norm growth, which also handles dominant
  // complex-conjugate pairs (where the iterates rotate rather than settle).
  Vector x(p);
  for (std::size_t i = 0; i < p; ++i) x[i] = 1.0 + 1e-3 * static_cast<double>(i);
  double norm0 = std::sqrt(dot(x, x));
  for (double& v : x) v /= norm0;

  const int burn = 16;
  const int steps = 512;
  double log_growth = 0.0;
  for (int it = 0; it < burn + steps; ++it) {
    Vector y = matvec(a, x);
    double norm = std::sqrt(dot(y, y));
    if (norm == 0.0) return 0.0;  // start vector hit a nilpotent cycle
    if (it >= burn) log_growth += std::log(norm);
    for (double& v : y) v /= norm;
    x = std::move(y);
  }
  return std::exp(log_growth / steps);
}

}  // namespace mcov
