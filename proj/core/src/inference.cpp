#include "mcov/inference.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mcov/errors.hpp"
#include "mcov/linalg.hpp"
#include "mcov/special.hpp"

namespace mcov {

namespace {

void require_positive_definite(const SigmaEstimate& estimate, const char* where) {
  if (!estimate.is_positive_definite)
    throw NumericError(std::string(where) +
                       ": covariance estimate is not positive definite (min eigenvalue " +
                       std::to_string(estimate.min_eigenvalue) + ")");
}

void require_level(double level) {
  if (!(level > 0.0 && level < 1.0))
    throw ConfigError("confidence level must lie in (0,1)");
}

}  // namespace

double ConfidenceRegion::mahalanobis_sq(const Vector& theta) const {
  Vector d(center.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = center[i] - theta[i];
  Vector u = forward_solve(sigma_chol, d);
  return static_cast<double>(n) * dot(u, u);
}

bool ConfidenceRegion::contains(const Vector& theta) const {
  return mahalanobis_sq(theta) <= chi2_radius;
}

ConfidenceRegion ellipsoid(const SigmaEstimate& estimate, const MeanAndScatter& summary,
                           std::size_t n, double level) {
  require_positive_definite(estimate, "ellipsoid");
  require_level(level);
  const std::size_t p = estimate.matrix.rows();

  ConfidenceRegion region;
  region.center = summary.mean;
  region.shape = estimate.matrix * (1.0 / static_cast<double>(n));
  region.level = level;
  region.chi2_radius = chi2_quantile(level, static_cast<int>(p));
  region.n = n;
  region.sigma_chol = cholesky(estimate.matrix);
  return region;
}

double ellipsoid_volume_pth_root(const SigmaEstimate& estimate, std::size_t n, double level) {
  require_positive_definite(estimate, "ellipsoid_volume_pth_root");
  require_level(level);
  const double p = static_cast<double>(estimate.matrix.rows());

  double log_unit_ball =
      0.5 * p * std::log(std::numbers::pi) - std::lgamma(0.5 * p + 1.0);
  double chi2 = chi2_quantile(level, static_cast<int>(p));
  double logdet = chol_logdet(cholesky(estimate.matrix));
  double log_vol_pth =
      log_unit_ball / p + 0.5 * std::log(chi2 / static_cast<double>(n)) + logdet / (2.0 * p);
  return std::exp(log_vol_pth);
}

BoxHalfWidths univariate_boxes(const SigmaEstimate& estimate, std::size_t n, double level) {
  require_level(level);
  const std::size_t p = estimate.matrix.rows();

  BoxHalfWidths out;
  out.uncorrected.resize(p);
  out.bonferroni.resize(p);
  double z_plain = normal_quantile(0.5 * (1.0 + level));
  double z_bonf = normal_quantile(1.0 - (1.0 - level) / (2.0 * static_cast<double>(p)));
  for (std::size_t i = 0; i < p; ++i) {
    double var_i = estimate.matrix(i, i);
    if (!(var_i > 0.0))
      throw NumericError("univariate_boxes: nonpositive diagonal at coordinate " +
                         std::to_string(i));
    double scale = std::sqrt(var_i / static_cast<double>(n));
    out.uncorrected[i] = z_plain * scale;
    out.bonferroni[i] = z_bonf * scale;
  }
  return out;
}

double box_volume_pth_root(const Vector& half_widths) {
  double log_sum = 0.0;
  for (double h : half_widths) log_sum += std::log(2.0 * h);
  return std::exp(log_sum / static_cast<double>(half_widths.size()));
}

double multivariate_ess(const MeanAndScatter& summary, const SigmaEstimate& estimate,
                        std::size_t n) {
  require_positive_definite(estimate, "multivariate_ess");
  const double p = static_cast<double>(estimate.matrix.rows());
  double logdet_lambda;
  try {
    logdet_lambda = chol_logdet(cholesky(summary.sample_cov));
  } catch (const NumericError&) {
    throw NumericError("multivariate_ess: sample covariance is not positive definite");
  }
  double logdet_sigma = chol_logdet(cholesky(estimate.matrix));
  return static_cast<double>(n) * std::exp((logdet_lambda - logdet_sigma) / p);
}

ConfidenceReport confidence_report(const SigmaEstimate& estimate, const MeanAndScatter& summary,
                                   std::size_t n, double level) {
  ConfidenceRegion region = ellipsoid(estimate, summary, n, level);

  ConfidenceReport report;
  report.center = region.center;
  report.shape = region.shape;
  report.level = level;
  report.chi2_radius = region.chi2_radius;
  report.box_half_widths = univariate_boxes(estimate, n, level);
  report.volume_pth_root.ellipsoid = ellipsoid_volume_pth_root(estimate, n, level);
  report.volume_pth_root.bonferroni_box = box_volume_pth_root(report.box_half_widths.bonferroni);
  report.volume_pth_root.uncorrected_box = box_volume_pth_root(report.box_half_widths.uncorrected);
  report.ess = multivariate_ess(summary, estimate, n);
  return report;
}

}  // namespace mcov
