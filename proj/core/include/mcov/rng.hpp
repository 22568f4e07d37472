#pragma once

#include <array>
#include <cstdint>

#include "mcov/matrix.hpp"

namespace mcov {

/// Counter-based random stream (Philox4x32-10, Salmon et al. 2011).
///
/// The 64-bit seed is the cipher key and the 64-bit stream index occupies the
/// high counter words, so (seed, stream) pairs index disjoint sequences and a
/// given pair reproduces the same outputs on every run and thread schedule.
/// Normal variates are generated by Box-Muller over the counter outputs; the
/// pairing means the normal sequence is also a pure function of (seed, stream).
///
/// A stream is single-owner: parallel replications each derive their own
/// stream index rather than sharing one generator.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform double in the open interval (0, 1).
  double next_uniform();

  /// Standard normal via Box-Muller (second variate of each pair is cached).
  double next_gaussian();

 private:
  void refill();

  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t block_ = 0;  // low counter words, incremented per refill
  std::array<std::uint32_t, 4> buf_{};
  int buf_pos_ = 4;  // exhausted
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// mean + L z with z a vector of iid standard normals drawn from rng.
/// cov_chol is the lower-triangular Cholesky factor of the target covariance.
Vector mvn_sample(RngStream& rng, const Vector& mean, const Matrix& cov_chol);

}  // namespace mcov
