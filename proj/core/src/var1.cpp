#include "mcov/var1.hpp"

#include <cmath>
#include <string>

#include "mcov/errors.hpp"
#include "mcov/linalg.hpp"

namespace mcov {

bool Var1Spec::phi_is_diagonal() const {
  for (std::size_t i = 0; i < phi.rows(); ++i)
    for (std::size_t j = 0; j < phi.cols(); ++j)
      if (i != j && phi(i, j) != 0.0) return false;
  return true;
}

Var1Spec make_var1_spec(Matrix phi, Matrix w) {
  if (phi.rows() != phi.cols()) throw ConfigError("var1: Phi must be square");
  if (w.rows() != w.cols() || w.rows() != phi.rows())
    throw ConfigError("var1: W must be square with the same dimension as Phi");

  double radius = spectral_radius(phi);
  if (!(radius < 1.0))
    throw ConfigError("var1: spectral radius of Phi must be below 1, got " +
                      std::to_string(radius));
  if (w.asymmetry() > 1e-10 * std::max(1.0, w.max_abs()))
    throw ConfigError("var1: W must be symmetric");
  try {
    cholesky(w);
  } catch (const NumericError&) {
    throw ConfigError("var1: W must be positive definite");
  }
  return Var1Spec{std::move(phi), std::move(w)};
}

Matrix ar1_cov(std::size_t p, double rho) {
  if (!(std::abs(rho) < 1.0)) throw ConfigError("ar1_cov: requires |rho| < 1");
  Matrix w(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      w(i, j) = std::pow(rho, std::abs(static_cast<double>(i) - static_cast<double>(j)));
  return w;
}

Matrix stationary_cov(const Var1Spec& spec) {
  const std::size_t p = spec.p();
  Matrix v;

  if (spec.phi_is_diagonal()) {
    v = Matrix(p, p);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j)
        v(i, j) = spec.w(i, j) / (1.0 - spec.phi(i, i) * spec.phi(j, j));
  } else {
    // (I_{p^2} - Phi (x) Phi) vec(V) = vec(W), row-major vec convention.
    const std::size_t pp = p * p;
    Matrix system(pp, pp);
    Matrix rhs(pp, 1);
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) {
        std::size_t row = i * p + j;
        rhs(row, 0) = spec.w(i, j);
        for (std::size_t k = 0; k < p; ++k) {
          double phik = spec.phi(i, k);
          if (phik == 0.0) continue;
          for (std::size_t l = 0; l < p; ++l)
            system(row, k * p + l) -= phik * spec.phi(j, l);
        }
        system(row, row) += 1.0;
      }
    }
    Matrix solution = lu_solve(std::move(system), std::move(rhs));
    v = Matrix(p, p);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) v(i, j) = solution(i * p + j, 0);
  }

  v.symmetrize();
  Matrix residual = v - matmul(matmul(spec.phi, v), spec.phi.transposed()) - spec.w;
  if (residual.frobenius_norm() > 1e-10 * v.frobenius_norm())
    throw NumericError("stationary_cov: residual exceeds 1e-10 relative");
  return v;
}

Matrix true_sigma(const Var1Spec& spec) {
  const std::size_t p = spec.p();
  Matrix v = stationary_cov(spec);

  // X = (I - Phi)^{-1} V; since V is symmetric, V (I - Phi^T)^{-1} = X^T.
  Matrix i_minus_phi = Matrix::identity(p) - spec.phi;
  Matrix x = lu_solve(std::move(i_minus_phi), v);
  Matrix sigma = x + x.transposed() - v;
  sigma.symmetrize();
  try {
    cholesky(sigma);
  } catch (const NumericError&) {
    throw NumericError("true_sigma: result is not positive definite");
  }
  return sigma;
}

Matrix lag_autocov(const Var1Spec& spec, const Matrix& v, long s) {
  Matrix g = v;
  for (long k = 0; k < std::labs(s); ++k)
    g = s >= 0 ? matmul(spec.phi, g) : matmul(g, spec.phi.transposed());
  return g;
}

Var1Truth var1_truth(const Var1Spec& spec) {
  Var1Truth truth;
  truth.v = stationary_cov(spec);
  truth.sigma = true_sigma(spec);
  return truth;
}

ChainMatrix simulate(const Var1Spec& spec, std::size_t n, RngStream& rng) {
  if (n < 1) throw ConfigError("simulate: n must be >= 1");
  const std::size_t p = spec.p();
  Matrix chol_w = cholesky(spec.w);
  const bool diagonal = spec.phi_is_diagonal();

  std::vector<double> rows(n * p);
  Vector y(p, 0.0);
  Vector z(p);
  Vector eps(p);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t i = 0; i < p; ++i) z[i] = rng.next_gaussian();
    for (std::size_t i = 0; i < p; ++i) {
      const double* lrow = chol_w.data() + i * p;
      double s = 0.0;
      for (std::size_t j = 0; j <= i; ++j) s += lrow[j] * z[j];
      eps[i] = s;
    }
    if (diagonal) {
      for (std::size_t i = 0; i < p; ++i) y[i] = spec.phi(i, i) * y[i] + eps[i];
    } else {
      Vector phi_y = matvec(spec.phi, y);
      for (std::size_t i = 0; i < p; ++i) y[i] = phi_y[i] + eps[i];
    }
    for (std::size_t i = 0; i < p; ++i) rows[t * p + i] = y[i];
  }
  return ChainMatrix(n, p, std::move(rows));
}

Var1Spec setting(int id) {
  if (id < 1 || id > 6) throw ConfigError("setting id must lie in 1..6");
  const std::size_t p = id <= 3 ? 10 : 50;
  const double lo = (id - 1) % 3 == 0 ? 0.01 : ((id - 1) % 3 == 1 ? 0.40 : 0.70);
  const double hi = (id - 1) % 3 == 0 ? 0.20 : ((id - 1) % 3 == 1 ? 0.60 : 0.90);

  Vector eigenvalues(p);
  for (std::size_t i = 0; i < p; ++i)
    eigenvalues[i] = lo + static_cast<double>(i) * (hi - lo) / static_cast<double>(p - 1);
  return make_var1_spec(Matrix::diagonal(eigenvalues), ar1_cov(p, 0.5));
}

}  // namespace mcov
