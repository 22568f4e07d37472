#pragma once

#include "mcov/chain.hpp"
#include "mcov/matrix.hpp"
#include "mcov/rng.hpp"

namespace mcov {

/// y_t = Phi y_{t-1} + eps_t with eps_t iid N_p(0, W). Valid specs have
/// spectral radius of Phi below 1 and symmetric positive definite W.
struct Var1Spec {
  Matrix phi;
  Matrix w;

  std::size_t p() const { return phi.rows(); }
  bool phi_is_diagonal() const;
};

/// Validates and returns the spec (spectral radius via the symmetric
/// eigensolver when Phi is symmetric, power iteration otherwise; W checked
/// SPD by Cholesky).
Var1Spec make_var1_spec(Matrix phi, Matrix w);

/// First-order autoregressive covariance: W_ij = rho^{|i-j|}, |rho| < 1.
Matrix ar1_cov(std::size_t p, double rho);

/// Stationary covariance V solving V = Phi V Phi^T + W. Closed form
/// V_ij = W_ij / (1 - phi_i phi_j) when Phi is diagonal, otherwise the dense
/// p^2 x p^2 Kronecker linear system. The residual is verified to 1e-10
/// relative.
Matrix stationary_cov(const Var1Spec& spec);

/// Asymptotic covariance of the scaled mean: (I-Phi)^{-1} V + V (I-Phi^T)^{-1}
/// - V, symmetrized and verified positive definite.
Matrix true_sigma(const Var1Spec& spec);

/// Process autocovariance Phi^s V for s >= 0, V (Phi^T)^{|s|} for s < 0.
Matrix lag_autocov(const Var1Spec& spec, const Matrix& v, long s);

struct Var1Truth {
  Matrix v;
  Matrix sigma;
};

Var1Truth var1_truth(const Var1Spec& spec);

/// Simulate rows y_1..y_n starting from y_0 = 0 (y_0 itself is not emitted).
/// Deterministic for a fixed (seed, stream): the first m rows of a length-n
/// run equal a length-m run on the same stream bit for bit.
ChainMatrix simulate(const Var1Spec& spec, std::size_t n, RngStream& rng);

/// The six reference settings: p in {10,10,10,50,50,50}, Phi diagonal with a
/// linear eigenvalue grid ({.01...20}, {.40...60}, {.70...90} for the three
/// mixing regimes), W = ar1_cov(p, 0.5).
Var1Spec setting(int id);

}  // namespace mcov
