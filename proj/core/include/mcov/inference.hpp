#pragma once

#include "mcov/chain.hpp"
#include "mcov/matrix.hpp"
#include "mcov/msve.hpp"

namespace mcov {

/// Confidence ellipsoid {theta : n (center - theta)^T Sigma^-1 (center - theta)
/// <= chi2_radius}. The boundary is inside (closed region), so coverage
/// counting has a fixed convention.
struct ConfidenceRegion {
  Vector center;
  Matrix shape;  // Sigma-hat / n
  double level = 0.0;
  double chi2_radius = 0.0;
  std::size_t n = 0;
  Matrix sigma_chol;  // Cholesky of Sigma-hat, for membership tests

  double mahalanobis_sq(const Vector& theta) const;
  bool contains(const Vector& theta) const;
};

/// Requires a positive definite estimate; indefinite estimates are rejected
/// outright rather than repaired.
ConfidenceRegion ellipsoid(const SigmaEstimate& estimate, const MeanAndScatter& summary,
                           std::size_t n, double level);

/// [pi^{p/2}/Gamma(p/2+1)]^{1/p} * sqrt(chi2_{level,p}/n) * |Sigma|^{1/(2p)},
/// evaluated in log space so p = 50 determinants cannot under/overflow.
double ellipsoid_volume_pth_root(const SigmaEstimate& estimate, std::size_t n, double level);

struct BoxHalfWidths {
  Vector uncorrected;  // z_{(1+level)/2} sqrt(Sigma_ii / n)
  Vector bonferroni;   // z at 1 - (1-level)/(2p) per coordinate
};

/// Univariate half-widths from the estimate's diagonal. With one coordinate
/// the two vectors coincide.
BoxHalfWidths univariate_boxes(const SigmaEstimate& estimate, std::size_t n, double level);

/// Geometric mean of the box side lengths (2 * half-width), i.e. volume to
/// the pth root, in log space.
double box_volume_pth_root(const Vector& half_widths);

/// n (|Lambda-hat| / |Sigma-hat|)^{1/p} via log determinants from Cholesky
/// factors. Both matrices must be positive definite.
double multivariate_ess(const MeanAndScatter& summary, const SigmaEstimate& estimate,
                        std::size_t n);

struct VolumePthRoots {
  double ellipsoid = 0.0;
  double bonferroni_box = 0.0;
  double uncorrected_box = 0.0;
};

struct ConfidenceReport {
  Vector center;
  Matrix shape;  // Sigma-hat / n
  double level = 0.0;
  double chi2_radius = 0.0;
  BoxHalfWidths box_half_widths;
  VolumePthRoots volume_pth_root;
  double ess = 0.0;
};

ConfidenceReport confidence_report(const SigmaEstimate& estimate, const MeanAndScatter& summary,
                                   std::size_t n, double level);

}  // namespace mcov
