#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mcov {

/// A named even weight function w_n(.) with truncation-point semantics:
/// w(0) = 1, |w(s)| <= 1, w(s) = 0 for |s| >= b_n. Evaluation is closed form,
/// first/second differences are computed from the closed forms.
class LagWindow {
 public:
  enum class Kind { kSimpleTruncation, kParzen, kBlackmanTukey, kScaledBartlett };

  static LagWindow simple_truncation();
  static LagWindow parzen(int q);
  static LagWindow modified_bartlett() { return parzen(1); }
  static LagWindow blackman_tukey(double a);
  static LagWindow tukey_hanning() { return blackman_tukey(0.25); }
  static LagWindow scaled_bartlett(double eta);

  /// Parse "name" or "name,key=value", e.g. "blackman-tukey,a=0.25",
  /// "parzen,q=2", "scaled-bartlett,eta=2". Throws ConfigError on unknown
  /// names or invalid parameters.
  static LagWindow parse(std::string_view spec);

  /// w_n(s) at truncation point bn.
  double operator()(long s, long bn) const;

  /// First backward difference w(k-1) - w(k), defined for 1 <= k <= bn.
  double delta1(long k, long bn) const;
  /// Second difference w(k-1) - 2 w(k) + w(k+1), defined for 1 <= k <= bn.
  double delta2(long k, long bn) const;

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  /// Name with parameters, e.g. "blackman-tukey(a=0.25)".
  std::string description() const;

 private:
  LagWindow(Kind kind, std::string name, double param);

  Kind kind_;
  std::string name_;
  double param_;  // q for Parzen, a for Blackman-Tukey, eta for scaled Bartlett
};

/// The cataloged windows used by identity and property checks.
std::vector<LagWindow> standard_catalog();

/// True when w satisfies the weight-function requirements at bn: w(0) = 1,
/// evenness, |w| <= 1, and w vanishing at and beyond bn.
bool satisfies_window_conditions(const LagWindow& w, long bn, double tol = 1e-12);

/// Truncation rule b_n = floor(n^nu), nu in (0,1). The floor is computed with
/// a boundary guard so exact powers (e.g. n = 1000, nu = 1/3) do not lose a
/// unit to floating-point rounding.
struct TruncationRule {
  double nu = 1.0 / 3.0;

  long bn(std::size_t n) const;
  /// The supported range for consistency is 0 < nu < 1/2.
  bool recommended_range() const { return nu > 0.0 && nu < 0.5; }
};

struct ConditionRow {
  std::size_t n = 0;
  long bn = 0;
  double delta1_weighted_sum = 0.0;  // (b_n/n) * sum_k k |D1 w(k)|
  double delta2_abs_sum = 0.0;       // sum_k |D2 w(k)|
  double bn_log_ratio = 0.0;         // b_n log(n) / n
  // psi-dependent terms for user-supplied psi(n) = n^{1/2 - lambda}:
  double psi_sq_delta2_sq = 0.0;  // b_n psi^2 log(n) (sum |D2 w|)^2
  double psi_sq_delta2 = 0.0;     // psi^2 sum |D2 w|
  double psi_over_bn = 0.0;       // psi / b_n
};

struct ConditionReport {
  std::vector<ConditionRow> rows;
  double lambda = 0.25;
  // Decreasing-to-zero trend verdicts over the supplied grid (strictly
  // decreasing and final value < 0.05). Limits cannot be machine-checked;
  // raw sequences are reported alongside.
  bool delta1_trend_pass = false;
  bool delta2_trend_pass = false;
  bool bn_log_trend_pass = false;

  bool all_pass() const { return delta1_trend_pass && delta2_trend_pass && bn_log_trend_pass; }
};

/// Evaluate the growth-rate quantities over an increasing n grid. Each n must
/// satisfy n > 2 b_n(n). lambda parameterizes psi(n) = n^{1/2 - lambda} for
/// the reported psi-dependent terms (verdicts use only psi-free quantities).
ConditionReport condition_diagnostics(const LagWindow& w, const TruncationRule& rule,
                                      std::span<const std::size_t> n_grid, double lambda = 0.25);

struct WindowIdentityResult {
  // (i)  D1 w(s) = sum_{k=s}^{bn} D2 w(k) for s = 1..bn
  // (ii) sum_{k=s+1}^{bn} D1 w(k) = w(s)  for s = 0..bn-1
  // (iii) sum_{k=1}^{bn} D1 w(k) = 1
  bool difference_link_pass = false;
  bool partial_sum_pass = false;
  bool total_sum_pass = false;
  double difference_link_err = 0.0;
  double partial_sum_err = 0.0;
  double total_sum_err = 0.0;

  bool all_pass() const { return difference_link_pass && partial_sum_pass && total_sum_pass; }
};

/// Verify the three summation identities relating w, D1 w and D2 w to 1e-12
/// absolute at the given truncation point.
WindowIdentityResult window_identity_check(const LagWindow& w, long bn);

}  // namespace mcov
