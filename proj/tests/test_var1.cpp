#include <doctest.h>

#include <cmath>

#include "mcov/autocov.hpp"
#include "mcov/errors.hpp"
#include "mcov/linalg.hpp"
#include "mcov/var1.hpp"

using namespace mcov;

TEST_CASE("ar1_cov structure") {
  CHECK((ar1_cov(4, 0.0) - Matrix::identity(4)).max_abs() == 0.0);

  Matrix w = ar1_cov(3, 0.5);
  Matrix expect{{1.0, 0.5, 0.25}, {0.5, 1.0, 0.5}, {0.25, 0.5, 1.0}};
  CHECK((w - expect).max_abs() == 0.0);

  CHECK_THROWS_AS(ar1_cov(3, 1.0), ConfigError);
  CHECK_THROWS_AS(ar1_cov(3, -1.5), ConfigError);
}

TEST_CASE("ar1_cov is SPD across the correlation range") {
  for (double rho : {-0.9, -0.5, 0.0, 0.3, 0.7, 0.95}) {
    for (std::size_t p : {2u, 5u, 12u}) {
      CHECK_NOTHROW(cholesky(ar1_cov(p, rho)));
    }
  }
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(make_var1_spec(Matrix::diagonal({1.0, 0.5}), Matrix::identity(2)), ConfigError);
  CHECK_THROWS_AS(make_var1_spec(Matrix::diagonal({0.5}), Matrix{{-1.0}}), ConfigError);
  CHECK_NOTHROW(make_var1_spec(Matrix::diagonal({0.99, -0.99}), Matrix::identity(2)));
}

TEST_CASE("stationary covariance analytic cases") {
  // Phi = 0 gives V = W.
  Var1Spec iid = make_var1_spec(Matrix(2, 2), ar1_cov(2, 0.3));
  CHECK((stationary_cov(iid) - iid.w).max_abs() <= 1e-15);

  // Scalar: V = w / (1 - phi^2).
  Var1Spec scalar = make_var1_spec(Matrix{{0.6}}, Matrix{{2.0}});
  CHECK(stationary_cov(scalar)(0, 0) == doctest::Approx(2.0 / (1.0 - 0.36)).epsilon(1e-14));
}

TEST_CASE("diagonal closed form agrees with the Kronecker solve") {
  // Run the dense solver on a non-diagonal similarity of a diagonal system
  // and compare against the closed form in the rotated basis.
  Vector lam = {0.1, 0.45, 0.8};
  Matrix w = ar1_cov(3, 0.5);
  Var1Spec diag_spec = make_var1_spec(Matrix::diagonal(lam), w);
  Matrix v_closed = stationary_cov(diag_spec);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(v_closed(i, j) == doctest::Approx(w(i, j) / (1.0 - lam[i] * lam[j])).epsilon(1e-14));

  // Force the dense path with an explicitly non-diagonal stable Phi.
  Matrix phi{{0.2, 0.1, 0.0}, {0.05, 0.3, -0.1}, {0.0, 0.2, 0.4}};
  Var1Spec dense_spec = make_var1_spec(phi, w);
  Matrix v = stationary_cov(dense_spec);
  Matrix residual = v - matmul(matmul(phi, v), phi.transposed()) - w;
  CHECK(residual.frobenius_norm() <= 1e-10 * v.frobenius_norm());
  CHECK(v.asymmetry() == 0.0);
}

TEST_CASE("true_sigma analytic cases") {
  Var1Spec iid = make_var1_spec(Matrix(3, 3), ar1_cov(3, 0.5));
  CHECK((true_sigma(iid) - iid.w).frobenius_norm() <= 1e-14);

  // Scalar: Sigma = w / (1 - phi)^2.
  Var1Spec scalar = make_var1_spec(Matrix{{0.5}}, Matrix{{3.0}});
  CHECK(true_sigma(scalar)(0, 0) == doctest::Approx(3.0 / 0.25).epsilon(1e-13));
}

TEST_CASE("true_sigma equals the truncated autocovariance series") {
  for (int id = 1; id <= 6; ++id) {
    Var1Spec spec = setting(id);
    Var1Truth truth = var1_truth(spec);

    Matrix series = truth.v;
    Matrix phi_pow = Matrix::identity(spec.p());
    for (long s = 1; s <= 64; ++s) {
      phi_pow = matmul(phi_pow, spec.phi);
      Matrix g = matmul(phi_pow, truth.v);
      series += g;
      series += g.transposed();
    }
    double rel = (series - truth.sigma).frobenius_norm() / truth.sigma.frobenius_norm();
    CAPTURE(id);
    // Settings 3 and 6 have phi_max = 0.9; the geometric tail past |s| = 64
    // is ~ 2 * 0.9^65 / 0.1 of the leading scale, far above 1e-8.
    if (id % 3 == 0) {
      CHECK(rel < 1e-2);
      // Adding the closed-form tail must close the gap entirely:
      // sum_{s > S} Phi^s V = Phi^{S+1} (I - Phi)^{-1} V.
      Matrix tail_base = matmul(phi_pow, spec.phi);  // Phi^{65}
      Matrix tail =
          matmul(tail_base, lu_solve(Matrix::identity(spec.p()) - spec.phi, truth.v));
      Matrix completed = series + tail + tail.transposed();
      CHECK((completed - truth.sigma).frobenius_norm() <=
            1e-12 * truth.sigma.frobenius_norm());
    } else {
      CHECK(rel <= 1e-8);
    }
  }
}

TEST_CASE("lag_autocov matches powers of Phi") {
  Var1Spec spec = setting(1);
  Matrix v = stationary_cov(spec);
  Matrix g2 = lag_autocov(spec, v, 2);
  Matrix expect = matmul(matmul(spec.phi, spec.phi), v);
  CHECK((g2 - expect).max_abs() <= 1e-14);
  CHECK((lag_autocov(spec, v, -2) - expect.transposed()).max_abs() <= 1e-14);
}

TEST_CASE("table of settings") {
  Var1Spec s1 = setting(1);
  CHECK(s1.p() == 10);
  CHECK(s1.phi(0, 0) == doctest::Approx(0.01));
  CHECK(s1.phi(9, 9) == doctest::Approx(0.20));

  Var1Spec s6 = setting(6);
  CHECK(s6.p() == 50);
  CHECK(s6.phi(49, 49) == doctest::Approx(0.90));
  CHECK(spectral_radius(s6.phi) == doctest::Approx(0.90));

  for (int id = 1; id <= 6; ++id) CHECK_NOTHROW(setting(id));
  CHECK_THROWS_AS(setting(0), ConfigError);
  CHECK_THROWS_AS(setting(7), ConfigError);
}

TEST_CASE("simulation determinism and degenerate limits") {
  Var1Spec spec = setting(1);
  RngStream a(9, 4), b(9, 4);
  ChainMatrix c1 = simulate(spec, 200, a);
  ChainMatrix c2 = simulate(spec, 200, b);
  for (std::size_t t = 0; t < 200; ++t)
    for (std::size_t i = 0; i < 10; ++i) CHECK(c1(t, i) == c2(t, i));

  // Prefix property: the first m rows of a longer run coincide bitwise.
  RngStream c(9, 4);
  ChainMatrix longer = simulate(spec, 500, c);
  for (std::size_t t = 0; t < 200; ++t)
    for (std::size_t i = 0; i < 10; ++i) CHECK(longer(t, i) == c1(t, i));
}

TEST_CASE("simulate near-degenerate innovations") {
  // W -> 0 limit with Phi = 0: all rows collapse to zero. W must stay SPD for
  // validation, so use a tiny diagonal.
  Var1Spec spec = make_var1_spec(Matrix(2, 2), Matrix::diagonal({1e-30, 1e-30}));
  RngStream rng(1, 0);
  ChainMatrix chain = simulate(spec, 50, rng);
  for (std::size_t t = 0; t < 50; ++t)
    for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(chain(t, i)) < 1e-12);
}

TEST_CASE("iid simulation recovers the innovation covariance") {
  Var1Spec spec = make_var1_spec(Matrix(2, 2), Matrix::identity(2));
  RngStream rng(31337, 0);
  ChainMatrix chain = simulate(spec, 100000, rng);
  MeanAndScatter s = summarize(chain);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(std::abs(s.sample_cov(i, j) - (i == j ? 1.0 : 0.0)) < 0.05);
}

TEST_CASE("empirical lag autocovariances track the process truth") {
  Var1Spec spec = setting(1);
  Var1Truth truth = var1_truth(spec);
  RngStream rng(271828, 0);
  const std::size_t n = 100000;
  ChainMatrix chain = simulate(spec, n, rng);
  auto acov = autocov_range(chain, 4);

  // Entrywise 5-standard-error bands; the crude scale sqrt(V_ii V_jj / n)
  // is adequate for phi_max = 0.2.
  for (long s = 0; s <= 2; ++s) {
    Matrix expect = lag_autocov(spec, truth.v, s);
    const Matrix& got = acov.nonnegative(s);
    for (std::size_t i = 0; i < 10; ++i)
      for (std::size_t j = 0; j < 10; ++j) {
        double se = std::sqrt(truth.v(i, i) * truth.v(j, j) / static_cast<double>(n));
        CHECK(std::abs(got(i, j) - expect(i, j)) <= 5.0 * se);
      }
  }
}
