#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mcov/errors.hpp"
#include "mcov/linalg.hpp"
#include "mcov/rng.hpp"
#include "mcov/special.hpp"

using namespace mcov;

#include "support/chi2_oracle.hpp"

using mcov_test::chi2_quantile_oracle;

TEST_CASE("chi2_quantile analytic df=2") {
  // With two degrees of freedom the CDF is 1 - exp(-x/2).
  CHECK(std::abs(chi2_quantile(0.90, 2) - 4.605170185988091) <= 1e-12);
  CHECK(std::abs(chi2_quantile(0.50, 2) - (-2.0 * std::log(0.5))) <= 1e-12);
}

TEST_CASE("chi2_quantile frozen oracle values") {
  // Computed with the integration-bisection oracle below and frozen.
  CHECK(chi2_quantile(0.90, 1) == doctest::Approx(2.705543454095404).epsilon(1e-12));
  CHECK(chi2_quantile(0.90, 5) == doctest::Approx(9.236356899781123).epsilon(1e-12));
}

TEST_CASE("chi2_quantile matches integration-bisection oracle") {
  for (int df : {1, 3, 5, 10}) {
    for (double prob : {0.10, 0.50, 0.90, 0.975}) {
      double got = chi2_quantile(prob, df);
      double want = chi2_quantile_oracle(prob, df);
      CHECK(std::abs(got - want) <= 1e-9 * std::max(1.0, want));
    }
  }
}

TEST_CASE("chi2_quantile composes with the CDF") {
  for (int df : {1, 2, 7, 25, 50}) {
    for (double prob : {0.01, 0.25, 0.5, 0.9, 0.99, 0.999}) {
      CHECK(chi2_cdf(chi2_quantile(prob, df), df) == doctest::Approx(prob).epsilon(1e-9));
    }
  }
}

TEST_CASE("chi2_quantile domain errors") {
  CHECK_THROWS_AS(chi2_quantile(0.0, 2), NumericError);
  CHECK_THROWS_AS(chi2_quantile(1.0, 2), NumericError);
  CHECK_THROWS_AS(chi2_quantile(0.5, 0), NumericError);
}

TEST_CASE("normal_quantile from the chi-square route") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-10));
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(normal_quantile(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-10));
}

TEST_CASE("RngStream determinism and stream separation") {
  RngStream a(42, 7), b(42, 7), c(42, 8);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  bool any_diff = false;
  RngStream a2(42, 7);
  for (int i = 0; i < 100; ++i) any_diff |= (a2.next_u64() != c.next_u64());
  CHECK(any_diff);
}

TEST_CASE("uniforms live in (0,1)") {
  RngStream rng(1, 0);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.next_uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("gaussian moments") {
  RngStream rng(123, 0);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    double z = rng.next_gaussian();
    sum += z;
    sumsq += z * z;
  }
  double mean = sum / n;
  double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("mvn_sample degenerate and deterministic") {
  Vector mean = {1.0, -2.0};
  Matrix zero(2, 2);
  RngStream rng(9, 1);
  Vector y = mvn_sample(rng, mean, zero);
  CHECK(y[0] == 1.0);
  CHECK(y[1] == -2.0);

  RngStream r1(77, 4), r2(77, 4);
  Matrix l = cholesky(Matrix{{2.0, 0.3}, {0.3, 1.0}});
  Vector s1 = mvn_sample(r1, mean, l);
  Vector s2 = mvn_sample(r2, mean, l);
  CHECK(s1[0] == s2[0]);
  CHECK(s1[1] == s2[1]);
}

TEST_CASE("mvn_sample covariance statistical check") {
  Matrix cov{{2.0, 0.7}, {0.7, 1.0}};
  Matrix l = cholesky(cov);
  Vector mean = {0.0, 0.0};
  RngStream rng(2025, 0);

  const int n = 100000;
  double s00 = 0.0, s01 = 0.0, s11 = 0.0;
  for (int i = 0; i < n; ++i) {
    Vector y = mvn_sample(rng, mean, l);
    s00 += y[0] * y[0];
    s01 += y[0] * y[1];
    s11 += y[1] * y[1];
  }
  CHECK(std::abs(s00 / n - 2.0) < 0.05);
  CHECK(std::abs(s01 / n - 0.7) < 0.05);
  CHECK(std::abs(s11 / n - 1.0) < 0.05);
}
