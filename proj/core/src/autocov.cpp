#include "mcov/autocov.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

#include "mcov/errors.hpp"

namespace mcov {

namespace {

// Threshold beyond which per-lag accumulation switches to compensated
// summation so lag-0 precision survives very long chains.
constexpr std::size_t kKahanThreshold = 1'000'000;

std::vector<double> centered_rows(const ChainMatrix& chain) {
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

Matrix lag_sum_plain(const std::vector<double>& z, std::size_t n, std::size_t p, std::size_t s) {
  Matrix acc(p, p);
  constexpr std::size_t kBlock = 1024;
  for (std::size_t t0 = 0; t0 + s < n; t0 += kBlock) {
    std::size_t t1 = std::min(t0 + kBlock, n - s);
    for (std::size_t t = t0; t < t1; ++t) {
      const double* zt = z.data() + t * p;
      const double* zts = z.data() + (t + s) * p;
      for (std::size_t i = 0; i < p; ++i) {
        double zi = zt[i];
        double* row = acc.data() + i * p;
        for (std::size_t j = 0; j < p; ++j) row[j] += zi * zts[j];
      }
    }
  }
  return acc;
}

Matrix lag_sum_kahan(const std::vector<double>& z, std::size_t n, std::size_t p, std::size_t s) {
  Matrix acc(p, p);
  Matrix comp(p, p);
  for (std::size_t t = 0; t + s < n; ++t) {
    const double* zt = z.data() + t * p;
    const double* zts = z.data() + (t + s) * p;
    for (std::size_t i = 0; i < p; ++i) {
      double zi = zt[i];
      double* arow = acc.data() + i * p;
      double* crow = comp.data() + i * p;
      for (std::size_t j = 0; j < p; ++j) {
        double y = zi * zts[j] - crow[j];
        double t2 = arow[j] + y;
        crow[j] = (t2 - arow[j]) - y;
        arow[j] = t2;
      }
    }
  }
  return acc;
}

Matrix lag_autocov_from_centered(const std::vector<double>& z, std::size_t n, std::size_t p,
                                 std::size_t s) {
  Matrix acc = n > kKahanThreshold ? lag_sum_kahan(z, n, p, s) : lag_sum_plain(z, n, p, s);
  acc *= 1.0 / static_cast<double>(n);
  return acc;
}

}  // namespace

Matrix sample_autocov(const ChainMatrix& chain, long s) {
  const std::size_t n = chain.n();
  if (static_cast<std::size_t>(std::labs(s)) >= n)
    throw ConfigError("sample_autocov: |s| must be < n");
  std::vector<double> z = centered_rows(chain);
  Matrix g = lag_autocov_from_centered(z, n, chain.p(), static_cast<std::size_t>(std::labs(s)));
  return s < 0 ? g.transposed() : g;
}

Matrix AutocovarianceSequence::lag(long s) const {
  if (std::labs(s) >= bn_) throw ConfigError("autocovariance lag out of range");
  return s < 0 ? gammas_[static_cast<std::size_t>(-s)].transposed()
               : gammas_[static_cast<std::size_t>(s)];
}

AutocovarianceSequence autocov_range(const ChainMatrix& chain, long bn, int threads) {
  const std::size_t n = chain.n();
  const std::size_t p = chain.p();
  if (bn < 1) throw ConfigError("autocov_range: b_n must be >= 1");
  if (static_cast<long>(n) <= 2 * bn)
    throw ConfigError("autocov_range: requires n > 2 b_n (n = " + std::to_string(n) +
                      ", b_n = " + std::to_string(bn) + ")");

  std::vector<double> z = centered_rows(chain);
  std::vector<Matrix> gammas(static_cast<std::size_t>(bn));

  auto compute = [&](std::size_t s) {
    gammas[s] = lag_autocov_from_centered(z, n, p, s);
  };

  if (threads <= 1 || bn == 1) {
    for (long s = 0; s < bn; ++s) compute(static_cast<std::size_t>(s));
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        std::size_t s = next.fetch_add(1);
        if (s >= static_cast<std::size_t>(bn)) return;
        compute(s);
      }
    };
    std::vector<std::thread> pool;
    int k = std::min<int>(threads, static_cast<int>(bn));
    pool.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  return AutocovarianceSequence(bn, n, p, std::move(gammas));
}

}  // namespace mcov
