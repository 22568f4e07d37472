#include "mcov/lag_window.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mcov/errors.hpp"

namespace mcov {

LagWindow::LagWindow(Kind kind, std::string name, double param)
    : kind_(kind), name_(std::move(name)), param_(param) {}

LagWindow LagWindow::simple_truncation() {
  return LagWindow(Kind::kSimpleTruncation, "simple-truncation", 0.0);
}

LagWindow LagWindow::parzen(int q) {
  if (q < 1) throw ConfigError("parzen window requires a positive integer q");
  return LagWindow(Kind::kParzen, q == 1 ? "modified-bartlett" : "parzen",
                   static_cast<double>(q));
}

LagWindow LagWindow::blackman_tukey(double a) {
  if (!(a > 0.0)) throw ConfigError("blackman-tukey window requires a > 0");
  return LagWindow(Kind::kBlackmanTukey, a == 0.25 ? "tukey-hanning" : "blackman-tukey", a);
}

LagWindow LagWindow::scaled_bartlett(double eta) {
  if (!(eta > 0.0) || eta == 1.0)
    throw ConfigError("scaled-bartlett window requires eta > 0, eta != 1");
  return LagWindow(Kind::kScaledBartlett, "scaled-bartlett", eta);
}

LagWindow LagWindow::parse(std::string_view spec) {
  std::string name;
  double a = -1.0, eta = -1.0, q = -1.0;

  std::size_t start = 0;
  bool first = true;
  while (start <= spec.size()) {
    std::size_t comma = spec.find(',', start);
    std::string_view part = spec.substr(start, comma == std::string_view::npos
                                                   ? std::string_view::npos
                                                   : comma - start);
    if (first) {
      name = std::string(part);
      first = false;
    } else {
      std::size_t eq = part.find('=');
      if (eq == std::string_view::npos)
        throw ConfigError("window parameter must be key=value, got '" + std::string(part) + "'");
      std::string key(part.substr(0, eq));
      double value;
      try {
        value = std::stod(std::string(part.substr(eq + 1)));
      } catch (const std::exception&) {
        throw ConfigError("invalid window parameter value in '" + std::string(part) + "'");
      }
      if (key == "a")
        a = value;
      else if (key == "eta")
        eta = value;
      else if (key == "q")
        q = value;
      else
        throw ConfigError("unknown window parameter '" + key + "'");
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }

  if (name == "simple-truncation" || name == "truncation") return simple_truncation();
  if (name == "modified-bartlett" || name == "bartlett")
    return parzen(q > 0 ? static_cast<int>(q) : 1);
  if (name == "parzen") {
    if (q < 0) throw ConfigError("parzen window requires parameter q");
    if (q != std::floor(q)) throw ConfigError("parzen q must be a positive integer");
    return parzen(static_cast<int>(q));
  }
  if (name == "tukey-hanning") return tukey_hanning();
  if (name == "blackman-tukey") {
    if (a < 0) throw ConfigError("blackman-tukey window requires parameter a");
    return blackman_tukey(a);
  }
  if (name == "scaled-bartlett") {
    if (eta < 0) throw ConfigError("scaled-bartlett window requires parameter eta");
    return scaled_bartlett(eta);
  }
  throw ConfigError("unknown lag window '" + name + "'");
}

double LagWindow::operator()(long s, long bn) const {
  long k = std::labs(s);
  if (k >= bn) return 0.0;
  switch (kind_) {
    case Kind::kSimpleTruncation:
      return 1.0;
    case Kind::kParzen:
      return 1.0 - std::pow(static_cast<double>(k) / static_cast<double>(bn), param_);
    case Kind::kBlackmanTukey:
      return 1.0 - 2.0 * param_ +
             2.0 * param_ * std::cos(std::numbers::pi * static_cast<double>(k) /
                                     static_cast<double>(bn));
    case Kind::kScaledBartlett:
      return 1.0 - param_ * static_cast<double>(k) / static_cast<double>(bn);
  }
  return 0.0;
}

namespace {

double ipow(double base, long e) {
  double r = 1.0;
  for (long i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

double LagWindow::delta1(long k, long bn) const {
  if (k < 1 || k > bn) throw ConfigError("delta1: lag must satisfy 1 <= k <= b_n");
  switch (kind_) {
    case Kind::kSimpleTruncation:
      return k == bn ? 1.0 : 0.0;
    case Kind::kParzen: {
      // w hits 0 exactly at k = bn, so one expression covers the boundary.
      long q = static_cast<long>(param_);
      return (ipow(static_cast<double>(k), q) - ipow(static_cast<double>(k - 1), q)) /
             ipow(static_cast<double>(bn), q);
    }
    case Kind::kBlackmanTukey:
      return (*this)(k - 1, bn) - (*this)(k, bn);
    case Kind::kScaledBartlett:
      if (k == bn) return 1.0 - param_ + param_ / static_cast<double>(bn);
      return param_ / static_cast<double>(bn);
  }
  return 0.0;
}

double LagWindow::delta2(long k, long bn) const {
  if (k < 1 || k > bn) throw ConfigError("delta2: lag must satisfy 1 <= k <= b_n");
  switch (kind_) {
    case Kind::kSimpleTruncation:
      if (k == bn) return 1.0;
      if (k == bn - 1) return -1.0;
      return 0.0;
    case Kind::kParzen: {
      long q = static_cast<long>(param_);
      double bq = ipow(static_cast<double>(bn), q);
      if (k == bn)
        return (bq - ipow(static_cast<double>(bn - 1), q)) / bq;
      return (2.0 * ipow(static_cast<double>(k), q) - ipow(static_cast<double>(k - 1), q) -
              ipow(static_cast<double>(k + 1), q)) /
             bq;
    }
    case Kind::kBlackmanTukey:
      return (*this)(k - 1, bn) - 2.0 * (*this)(k, bn) + (*this)(k + 1, bn);
    case Kind::kScaledBartlett:
      if (k == bn) return 1.0 - param_ + param_ / static_cast<double>(bn);
      if (k == bn - 1) return param_ - 1.0;
      return 0.0;
  }
  return 0.0;
}

std::string LagWindow::description() const {
  char buf[64];
  switch (kind_) {
    case Kind::kSimpleTruncation:
      return name_;
    case Kind::kParzen:
      if (param_ == 1.0) return name_;
      std::snprintf(buf, sizeof buf, "parzen(q=%d)", static_cast<int>(param_));
      return buf;
    case Kind::kBlackmanTukey:
      if (param_ == 0.25) return name_;  // tukey-hanning
      std::snprintf(buf, sizeof buf, "blackman-tukey(a=%g)", param_);
      return buf;
    case Kind::kScaledBartlett:
      std::snprintf(buf, sizeof buf, "scaled-bartlett(eta=%g)", param_);
      return buf;
  }
  return name_;
}

std::vector<LagWindow> standard_catalog() {
  return {
      LagWindow::simple_truncation(), LagWindow::modified_bartlett(),
      LagWindow::parzen(2),           LagWindow::parzen(3),
      LagWindow::tukey_hanning(),     LagWindow::blackman_tukey(0.4),
      LagWindow::scaled_bartlett(2.0), LagWindow::scaled_bartlett(0.5),
  };
}

bool satisfies_window_conditions(const LagWindow& w, long bn, double tol) {
  if (std::abs(w(0, bn) - 1.0) > tol) return false;
  for (long s = 1; s <= 2 * bn; ++s) {
    double ws = w(s, bn);
    if (std::abs(ws - w(-s, bn)) > tol) return false;
    if (std::abs(ws) > 1.0 + tol) return false;
    if (s >= bn && std::abs(ws) > tol) return false;
  }
  return true;
}

long TruncationRule::bn(std::size_t n) const {
  if (!(nu > 0.0 && nu < 1.0)) throw ConfigError("truncation exponent must lie in (0,1)");
  if (n == 0) throw ConfigError("truncation point undefined for n = 0");
  double x = std::pow(static_cast<double>(n), nu);
  long b = static_cast<long>(std::floor(x));
  // Guard against pow() landing one ulp under an exact power.
  if (std::pow(static_cast<double>(b + 1), 1.0 / nu) <=
      static_cast<double>(n) * (1.0 + 1e-12))
    ++b;
  return b < 1 ? 1 : b;
}

ConditionReport condition_diagnostics(const LagWindow& w, const TruncationRule& rule,
                                      std::span<const std::size_t> n_grid, double lambda) {
  if (n_grid.empty()) throw ConfigError("condition_diagnostics: empty n grid");

  ConditionReport report;
  report.lambda = lambda;
  for (std::size_t idx = 0; idx < n_grid.size(); ++idx) {
    std::size_t n = n_grid[idx];
    if (idx > 0 && n <= n_grid[idx - 1])
      throw ConfigError("condition_diagnostics: n grid must be strictly increasing");
    long b = rule.bn(n);
    if (static_cast<long>(n) <= 2 * b)
      throw ConfigError("condition_diagnostics: grid violates n > 2 b_n at n = " +
                        std::to_string(n));

    ConditionRow row;
    row.n = n;
    row.bn = b;
    double d1_weighted = 0.0;
    double d2_abs = 0.0;
    for (long k = 1; k <= b; ++k) {
      d1_weighted += static_cast<double>(k) * std::abs(w.delta1(k, b));
      d2_abs += std::abs(w.delta2(k, b));
    }
    double dn = static_cast<double>(n);
    double logn = std::log(dn);
    double psi = std::pow(dn, 0.5 - lambda);
    row.delta1_weighted_sum = static_cast<double>(b) / dn * d1_weighted;
    row.delta2_abs_sum = d2_abs;
    row.bn_log_ratio = static_cast<double>(b) * logn / dn;
    row.psi_sq_delta2_sq = static_cast<double>(b) * psi * psi * logn * d2_abs * d2_abs;
    row.psi_sq_delta2 = psi * psi * d2_abs;
    row.psi_over_bn = psi / static_cast<double>(b);
    report.rows.push_back(row);
  }

  auto trend_pass = [&](auto field) {
    for (std::size_t i = 1; i < report.rows.size(); ++i)
      if (!(field(report.rows[i]) < field(report.rows[i - 1]))) return false;
    return field(report.rows.back()) < 0.05;
  };
  report.delta1_trend_pass = trend_pass([](const ConditionRow& r) { return r.delta1_weighted_sum; });
  report.delta2_trend_pass = trend_pass([](const ConditionRow& r) { return r.delta2_abs_sum; });
  report.bn_log_trend_pass = trend_pass([](const ConditionRow& r) { return r.bn_log_ratio; });
  return report;
}

WindowIdentityResult window_identity_check(const LagWindow& w, long bn) {
  if (bn < 1) throw ConfigError("window_identity_check: b_n must be >= 1");

  WindowIdentityResult res;

  for (long s = 1; s <= bn; ++s) {
    double tail = 0.0;
    for (long k = s; k <= bn; ++k) tail += w.delta2(k, bn);
    res.difference_link_err = std::max(res.difference_link_err,
                                       std::abs(w.delta1(s, bn) - tail));
  }
  for (long s = 0; s < bn; ++s) {
    double sum = 0.0;
    for (long k = s + 1; k <= bn; ++k) sum += w.delta1(k, bn);
    res.partial_sum_err = std::max(res.partial_sum_err, std::abs(sum - w(s, bn)));
  }
  double total = 0.0;
  for (long k = 1; k <= bn; ++k) total += w.delta1(k, bn);
  res.total_sum_err = std::abs(total - 1.0);

  const double tol = 1e-12;
  res.difference_link_pass = res.difference_link_err <= tol;
  res.partial_sum_pass = res.partial_sum_err <= tol;
  res.total_sum_pass = res.total_sum_err <= tol;
  return res;
}

}  // namespace mcov
