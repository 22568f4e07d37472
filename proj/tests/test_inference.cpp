#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mcov/errors.hpp"
#include "mcov/inference.hpp"
#include "mcov/linalg.hpp"
#include "mcov/rng.hpp"
#include "mcov/special.hpp"

using namespace mcov;

namespace {

SigmaEstimate estimate_from(Matrix m, std::size_t n) {
  SigmaEstimate est;
  est.matrix = std::move(m);
  est.window = "test";
  est.bn = 1;
  est.n = n;
  est.eigenvalues = sym_eigen(est.matrix).eigenvalues;
  est.min_eigenvalue = est.eigenvalues.back();
  est.is_positive_definite = est.min_eigenvalue > 0.0;
  return est;
}

MeanAndScatter summary_with(Vector mean, Matrix cov) {
  return MeanAndScatter{std::move(mean), std::move(cov)};
}

}  // namespace

TEST_CASE("center always belongs to the ellipsoid; boundary is closed") {
  SigmaEstimate est = estimate_from(Matrix{{2.0, 0.5}, {0.5, 1.0}}, 100);
  MeanAndScatter summary = summary_with({1.0, -1.0}, Matrix::identity(2));
  ConfidenceRegion region = ellipsoid(est, summary, 100, 0.90);

  CHECK(region.contains(region.center));
  CHECK(region.chi2_radius == doctest::Approx(chi2_quantile(0.90, 2)));

  // Walk along the first eigenvector to sit exactly on the boundary.
  auto dec = sym_eigen(est.matrix);
  double scale = std::sqrt(region.chi2_radius * dec.eigenvalues[0] / 100.0);
  Vector boundary(2);
  for (std::size_t i = 0; i < 2; ++i)
    boundary[i] = region.center[i] + scale * dec.eigenvectors(i, 0);
  CHECK(region.mahalanobis_sq(boundary) == doctest::Approx(region.chi2_radius).epsilon(1e-10));
  CHECK(region.contains(boundary));

  Vector outside(2);
  for (std::size_t i = 0; i < 2; ++i)
    outside[i] = region.center[i] + 1.01 * scale * dec.eigenvectors(i, 0);
  CHECK_FALSE(region.contains(outside));
}

TEST_CASE("p=1 region equals the z interval") {
  const double sigma2 = 2.89, level = 0.90;
  const std::size_t n = 400;
  SigmaEstimate est = estimate_from(Matrix{{sigma2}}, n);
  MeanAndScatter summary = summary_with({3.0}, Matrix{{1.0}});
  ConfidenceRegion region = ellipsoid(est, summary, n, level);

  double z = normal_quantile(0.5 * (1.0 + level));
  double half = z * std::sqrt(sigma2 / static_cast<double>(n));
  CHECK(region.contains({3.0 + 0.999 * half}));
  CHECK_FALSE(region.contains({3.0 + 1.001 * half}));

  BoxHalfWidths boxes = univariate_boxes(est, n, level);
  CHECK(boxes.uncorrected[0] == doctest::Approx(half).epsilon(1e-12));
  CHECK(boxes.bonferroni[0] == doctest::Approx(half).epsilon(1e-12));
}

TEST_CASE("indefinite estimates are rejected outright") {
  SigmaEstimate bad = estimate_from(Matrix{{1.0, 2.0}, {2.0, 1.0}}, 50);
  MeanAndScatter summary = summary_with({0.0, 0.0}, Matrix::identity(2));
  CHECK_FALSE(bad.is_positive_definite);
  CHECK_THROWS_AS(ellipsoid(bad, summary, 50, 0.9), NumericError);
  CHECK_THROWS_AS(ellipsoid_volume_pth_root(bad, 50, 0.9), NumericError);
  CHECK_THROWS_AS(multivariate_ess(summary, bad, 50), NumericError);
}

TEST_CASE("ellipsoid volume: unit disk analytic case") {
  // p = 2, Sigma = I, n = 1, chi2 radius 1 gives the unit disk, area pi.
  SigmaEstimate est = estimate_from(Matrix::identity(2), 1);
  double level = chi2_cdf(1.0, 2);  // level whose chi-square quantile is 1
  double got = ellipsoid_volume_pth_root(est, 1, level);
  CHECK(got == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-10));
}

TEST_CASE("ellipsoid volume: p=1 reduces to the interval length") {
  const double sigma2 = 4.0, level = 0.95;
  const std::size_t n = 100;
  SigmaEstimate est = estimate_from(Matrix{{sigma2}}, n);
  double z = normal_quantile(0.5 * (1.0 + level));
  double interval = 2.0 * z * std::sqrt(sigma2 / static_cast<double>(n));
  CHECK(ellipsoid_volume_pth_root(est, n, level) == doctest::Approx(interval).epsilon(1e-12));
}

TEST_CASE("log-space and direct volume evaluation agree at p=5") {
  SigmaEstimate est = estimate_from(Matrix::identity(5), 10000);
  double got = ellipsoid_volume_pth_root(est, 10000, 0.90);
  // Direct (non-log) evaluation.
  double chi2 = chi2_quantile(0.90, 5);
  double unit_ball = std::pow(std::numbers::pi, 2.5) / std::tgamma(3.5);
  double direct = std::pow(unit_ball, 0.2) * std::sqrt(chi2 / 10000.0);
  CHECK(got == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("volume is monotone in level and in n") {
  SigmaEstimate est = estimate_from(Matrix{{1.0, 0.2}, {0.2, 2.0}}, 100);
  double v1 = ellipsoid_volume_pth_root(est, 100, 0.80);
  double v2 = ellipsoid_volume_pth_root(est, 100, 0.90);
  double v3 = ellipsoid_volume_pth_root(est, 100, 0.99);
  CHECK(v1 < v2);
  CHECK(v2 < v3);
  SigmaEstimate est2 = estimate_from(est.matrix, 1000);
  CHECK(ellipsoid_volume_pth_root(est2, 1000, 0.90) < v2);
}

TEST_CASE("Bonferroni half-widths dominate uncorrected ones") {
  SigmaEstimate est = estimate_from(Matrix{{1.0, 0.0, 0.0},
                                           {0.0, 4.0, 0.0},
                                           {0.0, 0.0, 0.25}},
                                    64);
  BoxHalfWidths boxes = univariate_boxes(est, 64, 0.90);
  for (std::size_t i = 0; i < 3; ++i) CHECK(boxes.bonferroni[i] > boxes.uncorrected[i]);

  // level=0.90, p=2 uses the 0.975 normal quantile per coordinate.
  SigmaEstimate est2 = estimate_from(Matrix::identity(2), 100);
  BoxHalfWidths b2 = univariate_boxes(est2, 100, 0.90);
  CHECK(b2.bonferroni[0] == doctest::Approx(normal_quantile(0.975) / 10.0).epsilon(1e-12));
}

TEST_CASE("box volume pth root is the geometric mean of side lengths") {
  Vector hw = {1.0, 4.0};
  CHECK(box_volume_pth_root(hw) == doctest::Approx(std::sqrt(2.0 * 8.0)).epsilon(1e-14));
}

TEST_CASE("ESS analytic cases") {
  Matrix lambda{{2.0, 0.3}, {0.3, 1.5}};
  SigmaEstimate same = estimate_from(lambda, 1000);
  MeanAndScatter summary = summary_with({0.0, 0.0}, lambda);
  CHECK(multivariate_ess(summary, same, 1000) == doctest::Approx(1000.0).epsilon(1e-12));

  // |Sigma| = 2^p |Lambda| halves the effective sample size.
  Matrix doubled = lambda * 2.0;
  SigmaEstimate est2 = estimate_from(doubled, 1000);
  CHECK(multivariate_ess(summary, est2, 1000) == doctest::Approx(500.0).epsilon(1e-12));
}

TEST_CASE("ESS and membership invariant under coordinatewise rescaling") {
  RngStream rng(33, 0);
  Matrix b(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) b(i, j) = rng.next_gaussian();
  Matrix sigma = matmul(b, b.transposed());
  for (std::size_t i = 0; i < 3; ++i) sigma(i, i) += 1.0;
  sigma.symmetrize();
  Matrix lambda = sigma;
  for (std::size_t i = 0; i < 3; ++i) lambda(i, i) += 0.5;

  const Vector d = {2.0, 0.25, 7.0};
  Matrix sigma_scaled(3, 3), lambda_scaled(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      sigma_scaled(i, j) = d[i] * sigma(i, j) * d[j];
      lambda_scaled(i, j) = d[i] * lambda(i, j) * d[j];
    }

  const std::size_t n = 500;
  SigmaEstimate est = estimate_from(sigma, n);
  SigmaEstimate est_scaled = estimate_from(sigma_scaled, n);
  Vector mean = {1.0, -2.0, 0.5};
  Vector mean_scaled(3);
  for (std::size_t i = 0; i < 3; ++i) mean_scaled[i] = d[i] * mean[i];

  double e1 = multivariate_ess(summary_with(mean, lambda), est, n);
  double e2 = multivariate_ess(summary_with(mean_scaled, lambda_scaled), est_scaled, n);
  CHECK(e1 == doctest::Approx(e2).epsilon(1e-10));

  ConfidenceRegion r1 = ellipsoid(est, summary_with(mean, lambda), n, 0.9);
  ConfidenceRegion r2 = ellipsoid(est_scaled, summary_with(mean_scaled, lambda_scaled), n, 0.9);
  RngStream probe(34, 0);
  for (int rep = 0; rep < 20; ++rep) {
    Vector theta(3), theta_scaled(3);
    for (std::size_t i = 0; i < 3; ++i) {
      theta[i] = mean[i] + probe.next_gaussian();
      theta_scaled[i] = d[i] * theta[i];
    }
    CHECK(r1.mahalanobis_sq(theta) == doctest::Approx(r2.mahalanobis_sq(theta_scaled)).epsilon(1e-10));
    CHECK(r1.contains(theta) == r2.contains(theta_scaled));
  }
}

TEST_CASE("diagonal estimate: ellipsoid fits in the scaled uncorrected box") {
  SigmaEstimate est = estimate_from(Matrix::diagonal({1.0, 3.0, 0.5, 2.0}), 256);
  const double level = 0.90;
  BoxHalfWidths boxes = univariate_boxes(est, 256, level);
  double chi2_p = chi2_quantile(level, 4);
  double chi2_1 = chi2_quantile(level, 1);
  double blow_up = std::sqrt(chi2_p / chi2_1);

  // Axis-aligned extreme points of the ellipsoid extend exactly to the
  // uncorrected half-width scaled by sqrt(chi2_p / chi2_1).
  for (std::size_t i = 0; i < 4; ++i) {
    double extent = std::sqrt(chi2_p * est.matrix(i, i) / 256.0);
    CHECK(extent <= blow_up * boxes.uncorrected[i] * (1.0 + 1e-12));
  }
}

TEST_CASE("confidence_report assembles a consistent bundle") {
  SigmaEstimate est = estimate_from(Matrix{{2.0, 0.4}, {0.4, 1.0}}, 900);
  MeanAndScatter summary = summary_with({0.1, 0.2}, Matrix{{1.8, 0.3}, {0.3, 0.9}});
  ConfidenceReport report = confidence_report(est, summary, 900, 0.90);

  CHECK(report.level == 0.90);
  CHECK(report.center[0] == 0.1);
  CHECK(report.shape(0, 0) == doctest::Approx(2.0 / 900.0));
  CHECK(report.volume_pth_root.bonferroni_box > report.volume_pth_root.uncorrected_box);
  CHECK(report.ess > 0.0);
  CHECK(report.chi2_radius == doctest::Approx(chi2_quantile(0.90, 2)));
}
