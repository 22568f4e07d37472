#pragma once

namespace mcov {

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
/// Series expansion for x < a+1, continued fraction otherwise.
double regularized_gamma_p(double a, double x);

/// Chi-square CDF with df degrees of freedom.
double chi2_cdf(double x, int df);

/// Chi-square quantile: the x with chi2_cdf(x, df) = prob, 0 < prob < 1.
/// Newton iteration on the regularized incomplete gamma with a maintained
/// bisection bracket; relative error well below 1e-10.
double chi2_quantile(double prob, int df);

/// Standard normal quantile, derived from the chi-square quantile at df = 1
/// composed with a square root (single quantile implementation to validate).
double normal_quantile(double prob);

}  // namespace mcov
