#pragma once

#include <string>

#include "mcov/autocov.hpp"
#include "mcov/chain.hpp"
#include "mcov/lag_window.hpp"
#include "mcov/matrix.hpp"

namespace mcov {

/// A symmetric p x p estimate of the asymptotic covariance, with the window,
/// truncation point and sample size that produced it. The matrix is
/// symmetrized once, at the end; positive definiteness is reported, never
/// repaired (inference operations reject indefinite estimates).
struct SigmaEstimate {
  Matrix matrix;
  std::string window;
  long bn = 0;
  std::size_t n = 0;
  bool is_positive_definite = false;
  double min_eigenvalue = 0.0;
  Vector eigenvalues;  // descending, from the PD check
};

/// Weighted, truncated sum of the lag-s sample autocovariances over
/// s = -(b_n-1)..b_n-1. Checks the window's weight-function requirements and
/// n > 2 b_n before computing.
SigmaEstimate msve(const ChainMatrix& chain, const LagWindow& w, long bn, int threads = 1);

/// Same estimator from precomputed autocovariances, so several windows can
/// reuse one pass over the chain.
SigmaEstimate msve_from_autocov(const AutocovarianceSequence& acov, const LagWindow& w);

/// The overlapping-means form: (1/n) sum_{l=0}^{n-b_n} sum_{k=1}^{b_n}
/// k^2 D2w(k) [Ybar_l(k) - Ybar_n][Ybar_l(k) - Ybar_n]^T, with Ybar_l(k) the
/// average of rows l+1..l+k. Evaluated via prefix sums of rows; lags with
/// D2w(k) = 0 are skipped.
Matrix msve_overlap_form(const ChainMatrix& chain, const LagWindow& w, long bn);

/// The end correction d_n relating the two forms: msve = overlap form + d_n
/// exactly. Empty index ranges contribute zero; the magnitude is
/// O(b_n/n) times the scatter scale. Shipped so edge effects can be
/// quantified directly.
Matrix end_correction(const ChainMatrix& chain, const LagWindow& w, long bn);

}  // namespace mcov
