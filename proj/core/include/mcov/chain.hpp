#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "mcov/matrix.hpp"

namespace mcov {

/// An n x p matrix of Monte Carlo output rows, in temporal order.
/// Immutable after construction: every entry is validated finite, n >= 1,
/// p >= 1, so downstream code can share it read-only across threads.
class ChainMatrix {
 public:
  ChainMatrix(std::size_t n, std::size_t p, std::vector<double> row_major);

  std::size_t n() const { return n_; }
  std::size_t p() const { return p_; }

  /// Row t, 0-based.
  std::span<const double> row(std::size_t t) const { return {data_.data() + t * p_, p_}; }
  double operator()(std::size_t t, std::size_t i) const { return data_[t * p_ + i]; }
  std::span<const double> values() const { return data_; }

  /// View of the first m rows as a chain observed at a shorter length.
  ChainMatrix prefix(std::size_t m) const;

  Vector column_mean() const;

 private:
  std::size_t n_;
  std::size_t p_;
  std::vector<double> data_;
};

enum class ChainFormat { kCsv, kRawF64 };

/// Load a chain from file. CSV: comma separated, '.' decimal, LF or CRLF,
/// optional single header line (detected by a non-numeric first row).
/// raw-f64: 16-byte header "MCOV" + u32 n + u32 p + 4 reserved bytes, then
/// n*p little-endian doubles, row major.
/// skip_first drops the first k rows after parsing (burn-in skip, default 0).
ChainMatrix load_chain(const std::filesystem::path& path, ChainFormat format,
                       std::size_t skip_first = 0);

void save_chain(const ChainMatrix& chain, const std::filesystem::path& path, ChainFormat format);

struct MeanAndScatter {
  Vector mean;        // columnwise average
  Matrix sample_cov;  // centered outer products with 1/(n-1)
};

/// Sample mean and sample covariance. Requires n >= 2 for the covariance.
MeanAndScatter summarize(const ChainMatrix& chain);

/// Lag-s correlation of coordinate i at time t with coordinate j at time t+s
/// for s = 0..max_lag, normalized by the two marginal lag-0 standard
/// deviations. Throws on a zero-variance coordinate.
std::vector<double> acf_ccf(const ChainMatrix& chain, std::size_t i, std::size_t j,
                            std::size_t max_lag);

}  // namespace mcov
