#pragma once

#include <vector>

#include "mcov/chain.hpp"
#include "mcov/matrix.hpp"

namespace mcov {

/// Lag-s sample autocovariance: centered by the full-sample mean, divisor
/// exactly n (not n - s), summed over t = 1..n-s for s >= 0. Negative lags
/// are the exact transpose of the matching positive lag. Requires |s| < n.
Matrix sample_autocov(const ChainMatrix& chain, long s);

/// Autocovariances at lags 0..b_n-1, computed once; negative lags come out
/// as bit-identical transposes.
class AutocovarianceSequence {
 public:
  AutocovarianceSequence(long bn, std::size_t n, std::size_t p, std::vector<Matrix> gammas)
      : bn_(bn), n_(n), p_(p), gammas_(std::move(gammas)) {}

  long bn() const { return bn_; }
  std::size_t n() const { return n_; }
  std::size_t p() const { return p_; }

  /// Stored matrix for 0 <= s < b_n.
  const Matrix& nonnegative(long s) const { return gammas_[static_cast<std::size_t>(s)]; }
  /// Any lag in -(b_n-1)..b_n-1; negative lags materialize the transpose.
  Matrix lag(long s) const;

 private:
  long bn_;
  std::size_t n_;
  std::size_t p_;
  std::vector<Matrix> gammas_;
};

/// Compute lags 0..b_n-1 in one pass over the chain per lag. Requires
/// n > 2 b_n. Per-lag sums are independently ordered, so computing lags in
/// parallel leaves the result bit-identical to the serial order.
AutocovarianceSequence autocov_range(const ChainMatrix& chain, long bn, int threads = 1);

}  // namespace mcov
