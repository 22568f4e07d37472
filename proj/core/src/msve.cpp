#include "mcov/msve.hpp"

#include <cmath>
#include <string>

#include "mcov/errors.hpp"
#include "mcov/linalg.hpp"

namespace mcov {

namespace {

void require_preconditions(const LagWindow& w, std::size_t n, long bn) {
  if (bn < 1) throw ConfigError("msve: b_n must be >= 1");
  if (static_cast<long>(n) <= 2 * bn)
    throw ConfigError("msve: requires n > 2 b_n (n = " + std::to_string(n) +
                      ", b_n = " + std::to_string(bn) + ")");
  if (!satisfies_window_conditions(w, bn))
    throw ConfigError("msve: window '" + w.description() +
                      "' violates the weight-function requirements at b_n = " +
                      std::to_string(bn));
}

std::vector<double> centered(const ChainMatrix& chain) {
  const std::size_t n = chain.n();
  const std::size_t p = chain.p();
  Vector mean = chain.column_mean();
  std::vector<double> z(n * p);
  for (std::size_t t = 0; t < n; ++t) {
    auto r = chain.row(t);
    for (std::size_t i = 0; i < p; ++i) z[t * p + i] = r[i] - mean[i];
  }
  return z;
}

}  // namespace

SigmaEstimate msve_from_autocov(const AutocovarianceSequence& acov, const LagWindow& w) {
  const long bn = acov.bn();
  const std::size_t p = acov.p();
  if (!satisfies_window_conditions(w, bn))
    throw ConfigError("msve: window '" + w.description() +
                      "' violates the weight-function requirements at b_n = " +
                      std::to_string(bn));

  // Evenness pairs lag s with -s: w(s) (gamma(s) + gamma(s)^T).
  Matrix sum = acov.nonnegative(0);
  for (long s = 1; s < bn; ++s) {
    double ws = w(s, bn);
    if (ws == 0.0) continue;
    const Matrix& g = acov.nonnegative(s);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) sum(i, j) += ws * (g(i, j) + g(j, i));
  }
  sum.symmetrize();
  if (!sum.all_finite()) throw NumericError("msve: non-finite estimate");

  SigmaEstimate est;
  est.matrix = std::move(sum);
  est.window = w.description();
  est.bn = bn;
  est.n = acov.n();
  est.eigenvalues = sym_eigen(est.matrix).eigenvalues;
  est.min_eigenvalue = est.eigenvalues.back();
  est.is_positive_definite =
      est.min_eigenvalue > 1e-10 * est.matrix.trace() / static_cast<double>(p);
  return est;
}

SigmaEstimate msve(const ChainMatrix& chain, const LagWindow& w, long bn, int threads) {
  require_preconditions(w, chain.n(), bn);
  return msve_from_autocov(autocov_range(chain, bn, threads), w);
}

Matrix msve_overlap_form(const ChainMatrix& chain, const LagWindow& w, long bn) {
  require_preconditions(w, chain.n(), bn);
  const std::size_t n = chain.n();
  const std::size_t p = chain.p();

  // Prefix sums of centered rows: S[t] = sum of (rows 0..t-1 minus the mean),
  // so Ybar_l(k) - Ybar_n = (S[l+k] - S[l]) / k directly.
  std::vector<double> z = centered(chain);
  std::vector<double> prefix((n + 1) * p, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    const double* zt = z.data() + t * p;
    const double* prev = prefix.data() + t * p;
    double* next = prefix.data() + (t + 1) * p;
    for (std::size_t i = 0; i < p; ++i) next[i] = prev[i] + zt[i];
  }

  Matrix acc(p, p);
  Vector v(p);
  for (long k = 1; k <= bn; ++k) {
    double d2 = w.delta2(k, bn);
    if (d2 == 0.0) continue;
    double coeff = static_cast<double>(k) * static_cast<double>(k) * d2;
    for (std::size_t l = 0; l + static_cast<std::size_t>(bn) <= n; ++l) {
      const double* lo = prefix.data() + l * p;
      const double* hi = prefix.data() + (l + static_cast<std::size_t>(k)) * p;
      for (std::size_t i = 0; i < p; ++i)
        v[i] = (hi[i] - lo[i]) / static_cast<double>(k);
      add_scaled_outer(acc, coeff, v, v);
    }
  }
  acc *= 1.0 / static_cast<double>(n);
  return acc;
}

Matrix end_correction(const ChainMatrix& chain, const LagWindow& w, long bn) {
  require_preconditions(w, chain.n(), bn);
  const std::size_t n = chain.n();
  const std::size_t p = chain.p();
  std::vector<double> z = centered(chain);
  auto zrow = [&](long t1) {  // 1-based row index
    return std::span<const double>(z.data() + static_cast<std::size_t>(t1 - 1) * p, p);
  };

  Matrix acc(p, p);
  const long nl = static_cast<long>(n);

  // Same-time products weighted by D1 w(t).
  for (long t = 1; t <= bn; ++t) {
    double c = w.delta1(t, bn);
    if (c == 0.0) continue;
    for (long l = 1; l <= t - 1; ++l) add_scaled_outer(acc, c, zrow(l), zrow(l));
    for (long l = nl - bn + t + 1; l <= nl; ++l) add_scaled_outer(acc, c, zrow(l), zrow(l));
  }
  // Cross-lag products weighted by D1 w(s+t), symmetrized in the two orders.
  for (long s = 1; s <= bn - 1; ++s) {
    for (long t = 1; t <= bn - s; ++t) {
      double c = w.delta1(s + t, bn);
      if (c == 0.0) continue;
      for (long l = 1; l <= t - 1; ++l) {
        add_scaled_outer(acc, c, zrow(l), zrow(l + s));
        add_scaled_outer(acc, c, zrow(l + s), zrow(l));
      }
      for (long l = nl - bn + t + 1; l <= nl - s; ++l) {
        add_scaled_outer(acc, c, zrow(l), zrow(l + s));
        add_scaled_outer(acc, c, zrow(l + s), zrow(l));
      }
    }
  }
  acc *= 1.0 / static_cast<double>(n);
  return acc;
}

}  // namespace mcov
