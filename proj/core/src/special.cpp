#include "mcov/special.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mcov/errors.hpp"

namespace mcov {

namespace {

double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double term = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) = 1 - P(a, x), modified Lentz.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-17) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw NumericError("regularized_gamma_p: domain violation");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double chi2_cdf(double x, int df) {
  if (df < 1) throw NumericError("chi2_cdf: df must be positive");
  if (x <= 0.0) return 0.0;
  return regularized_gamma_p(0.5 * df, 0.5 * x);
}

double chi2_quantile(double prob, int df) {
  if (!(prob > 0.0 && prob < 1.0))
    throw NumericError("chi2_quantile: prob must lie in (0,1), got " + std::to_string(prob));
  if (df < 1) throw NumericError("chi2_quantile: df must be positive");

  const double a = 0.5 * df;

  // Bracket the root in the half-scale variable y = x/2.
  double lo = 0.0;
  double hi = a + 1.0;
  while (regularized_gamma_p(a, hi) < prob) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw NumericError("chi2_quantile: bracket overflow");
  }

  double y = 0.5 * (lo + hi);
  const double log_gamma_a = std::lgamma(a);
  for (int it = 0; it < 200; ++it) {
    double f = regularized_gamma_p(a, y) - prob;
    if (f > 0.0)
      hi = y;
    else
      lo = y;
    double pdf = std::exp(-y + (a - 1.0) * std::log(y) - log_gamma_a);
    double step = pdf > 0.0 ? f / pdf : 0.0;
    double next = y - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // Newton left the bracket
    if (std::abs(next - y) <= 1e-15 * std::max(next, 1e-300)) {
      y = next;
      break;
    }
    y = next;
  }
  return 2.0 * y;
}

double normal_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) throw NumericError("normal_quantile: prob must lie in (0,1)");
  if (prob == 0.5) return 0.0;
  if (prob > 0.5) return std::sqrt(chi2_quantile(2.0 * prob - 1.0, 1));
  return -std::sqrt(chi2_quantile(1.0 - 2.0 * prob, 1));
}

}  // namespace mcov
