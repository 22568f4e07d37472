#include <doctest.h>

#include <cmath>
#include <vector>

#include "mcov/errors.hpp"
#include "mcov/lag_window.hpp"

using namespace mcov;

TEST_CASE("window construction and parsing") {
  CHECK(LagWindow::modified_bartlett().name() == "modified-bartlett");
  CHECK(LagWindow::tukey_hanning().name() == "tukey-hanning");
  CHECK(LagWindow::parse("bartlett").name() == "modified-bartlett");
  CHECK(LagWindow::parse("blackman-tukey,a=0.25").name() == "tukey-hanning");
  CHECK(LagWindow::parse("scaled-bartlett,eta=2").description() == "scaled-bartlett(eta=2)");
  CHECK(LagWindow::parse("parzen,q=2").description() == "parzen(q=2)");

  CHECK_THROWS_AS(LagWindow::parse("hamming"), ConfigError);
  CHECK_THROWS_AS(LagWindow::parse("parzen,q=0"), ConfigError);
  CHECK_THROWS_AS(LagWindow::parse("parzen,q=1.5"), ConfigError);
  CHECK_THROWS_AS(LagWindow::parse("scaled-bartlett,eta=1"), ConfigError);
  CHECK_THROWS_AS(LagWindow::parse("blackman-tukey,a=-1"), ConfigError);
  CHECK_THROWS_AS(LagWindow::parse("blackman-tukey,b=1"), ConfigError);
}

TEST_CASE("window values at quoted points") {
  LagWindow bartlett = LagWindow::modified_bartlett();
  CHECK(bartlett(2, 4) == doctest::Approx(0.5));  // 1 - 2/4

  LagWindow th = LagWindow::tukey_hanning();
  CHECK(th(2, 4) == doctest::Approx(0.5));  // 0.5 + 0.5 cos(pi/2)

  for (const LagWindow& w : standard_catalog()) {
    CHECK(w(0, 4) == 1.0);
    CHECK(w(4, 4) == 0.0);   // s = b_n
    CHECK(w(9, 4) == 0.0);   // far past the truncation point
    CHECK(w(-3, 4) == w(3, 4));
  }
}

TEST_CASE("weight-function requirements hold across the catalog") {
  for (const LagWindow& w : standard_catalog()) {
    for (long bn : {1L, 2L, 3L, 5L, 16L, 64L}) {
      CAPTURE(w.description());
      CAPTURE(bn);
      CHECK(satisfies_window_conditions(w, bn));
    }
  }
}

TEST_CASE("modified Bartlett differences are exact") {
  for (long bn : {1L, 2L, 4L, 9L}) {
    LagWindow w = LagWindow::modified_bartlett();
    for (long k = 1; k <= bn; ++k) {
      CHECK(w.delta1(k, bn) == doctest::Approx(1.0 / static_cast<double>(bn)).epsilon(1e-15));
      double expected = (k == bn) ? 1.0 / static_cast<double>(bn) : 0.0;
      CHECK(w.delta2(k, bn) == doctest::Approx(expected).epsilon(1e-15));
    }
  }
}

TEST_CASE("scaled Bartlett boundary differences") {
  LagWindow w = LagWindow::scaled_bartlett(2.0);
  // eta - 1 at the next-to-last lag, 1 - eta + eta/b at the last.
  CHECK(w.delta2(3, 4) == doctest::Approx(1.0));
  CHECK(w.delta2(4, 4) == doctest::Approx(-0.5));
  CHECK(w.delta1(2, 4) == doctest::Approx(0.5));
  CHECK(w.delta1(4, 4) == doctest::Approx(-0.5));
}

TEST_CASE("simple truncation second differences") {
  LagWindow w = LagWindow::simple_truncation();
  CHECK(w.delta2(3, 4) == -1.0);
  CHECK(w.delta2(4, 4) == 1.0);
  CHECK(w.delta2(2, 4) == 0.0);
}

TEST_CASE("differences agree with direct evaluation") {
  for (const LagWindow& w : standard_catalog()) {
    for (long bn : {1L, 3L, 7L, 20L}) {
      for (long k = 1; k <= bn; ++k) {
        CHECK(std::abs(w.delta1(k, bn) - (w(k - 1, bn) - w(k, bn))) <= 1e-13);
        CHECK(std::abs(w.delta2(k, bn) -
                       (w(k - 1, bn) - 2.0 * w(k, bn) + w(k + 1, bn))) <= 1e-13);
      }
    }
  }
  CHECK_THROWS_AS(LagWindow::modified_bartlett().delta1(0, 4), ConfigError);
  CHECK_THROWS_AS(LagWindow::modified_bartlett().delta2(5, 4), ConfigError);
}

TEST_CASE("summation identities hold across the catalog") {
  for (const LagWindow& w : standard_catalog()) {
    for (long bn = 1; bn <= 64; ++bn) {
      auto res = window_identity_check(w, bn);
      CAPTURE(w.description());
      CAPTURE(bn);
      CHECK(res.all_pass());
    }
  }
}

TEST_CASE("identity check via explicit summation for Tukey-Hanning b_n=7") {
  LagWindow w = LagWindow::tukey_hanning();
  const long bn = 7;
  // Direct summation oracle for each identity.
  for (long s = 1; s <= bn; ++s) {
    double tail = 0.0;
    for (long k = s; k <= bn; ++k) tail += w.delta2(k, bn);
    CHECK(std::abs(w.delta1(s, bn) - tail) <= 1e-12);
  }
  for (long s = 0; s < bn; ++s) {
    double sum = 0.0;
    for (long k = s + 1; k <= bn; ++k) sum += w.delta1(k, bn);
    CHECK(std::abs(sum - w(s, bn)) <= 1e-12);
  }
  CHECK(window_identity_check(w, bn).all_pass());
}

TEST_CASE("identity total sum at b_n=1 reduces to w(0) - w(1)") {
  LagWindow w = LagWindow::modified_bartlett();
  auto res = window_identity_check(w, 1);
  CHECK(res.total_sum_pass);
  CHECK(w.delta1(1, 1) == 1.0);
}

TEST_CASE("smoothness of the consistent windows on [0,1]") {
  // Parzen and Blackman-Tukey reparameterized on [0,1] have bounded first
  // and second derivatives; sampled finite differences must stay bounded.
  // Interior lags only: the last one or two differences pick up the
  // truncation jump, which is a boundary effect rather than a derivative.
  for (const LagWindow& w : {LagWindow::modified_bartlett(), LagWindow::parzen(2),
                             LagWindow::tukey_hanning()}) {
    const long bn = 64;
    double max_d1 = 0.0, max_d2 = 0.0;
    for (long k = 1; k <= bn - 1; ++k)
      max_d1 = std::max(max_d1, std::abs(w.delta1(k, bn)) * static_cast<double>(bn));
    for (long k = 1; k <= bn - 2; ++k)
      max_d2 = std::max(max_d2, std::abs(w.delta2(k, bn)) * static_cast<double>(bn) *
                                    static_cast<double>(bn));
    CAPTURE(w.description());
    CHECK(max_d1 <= 10.0);
    CHECK(max_d2 <= 20.0);
  }
}

TEST_CASE("truncation rule floors exact powers correctly") {
  TruncationRule rule;  // nu = 1/3
  CHECK(rule.bn(1000) == 10);
  CHECK(rule.bn(5000) == 17);
  CHECK(rule.bn(10000) == 21);
  CHECK(rule.bn(50000) == 36);
  CHECK(rule.bn(100000) == 46);
  CHECK(rule.bn(1) == 1);
  CHECK(rule.bn(8) == 2);

  TruncationRule half{0.5};
  CHECK(half.bn(10000) == 100);
  CHECK_FALSE(half.recommended_range());
  CHECK(TruncationRule{0.33}.recommended_range());

  // b_n is nondecreasing pointwise; the ratio n/b_n dips at floor jumps for
  // consecutive n, so its monotonicity is checked over experiment-style
  // grids (doubling sizes and the usual decade grid).
  long prev = 1;
  for (std::size_t n = 3; n < 3000; ++n) {
    long b = rule.bn(n);
    CHECK(b >= prev);
    prev = b;
  }
  std::vector<std::size_t> grids[] = {
      {8, 16, 32, 64, 128, 256, 512, 1024, 4096, 16384, 65536, 262144},
      {1000, 5000, 10000, 50000, 100000}};
  for (const auto& grid : grids) {
    double prev_ratio = 0.0;
    for (std::size_t n : grid) {
      double ratio = static_cast<double>(n) / static_cast<double>(rule.bn(n));
      CHECK(ratio >= prev_ratio);
      prev_ratio = ratio;
    }
  }
}

TEST_CASE("condition diagnostics: modified Bartlett passes") {
  std::vector<std::size_t> grid = {1000, 10000, 100000};
  auto report = condition_diagnostics(LagWindow::modified_bartlett(), TruncationRule{}, grid);
  CHECK(report.rows.size() == 3);
  // Sum |D2 w| = 1/b_n exactly for the modified Bartlett window.
  for (const auto& row : report.rows)
    CHECK(row.delta2_abs_sum == doctest::Approx(1.0 / static_cast<double>(row.bn)).epsilon(1e-12));
  CHECK(report.all_pass());
}

TEST_CASE("condition diagnostics: scaled Bartlett fails the second-difference sum") {
  std::vector<std::size_t> grid = {1000, 10000, 100000};
  auto report = condition_diagnostics(LagWindow::scaled_bartlett(2.0), TruncationRule{}, grid);
  for (const auto& row : report.rows) CHECK(row.delta2_abs_sum >= 1.0);
  CHECK_FALSE(report.delta2_trend_pass);
  CHECK(report.delta1_trend_pass);  // the first-difference condition still holds
}

TEST_CASE("condition diagnostics: simple truncation fails") {
  std::vector<std::size_t> grid = {1000, 10000, 100000};
  auto report = condition_diagnostics(LagWindow::simple_truncation(), TruncationRule{}, grid);
  for (const auto& row : report.rows) CHECK(row.delta2_abs_sum == doctest::Approx(2.0));
  CHECK_FALSE(report.delta2_trend_pass);
}

TEST_CASE("condition diagnostics rejects grids violating n > 2 b_n") {
  std::vector<std::size_t> bad = {4};
  CHECK_THROWS_AS(condition_diagnostics(LagWindow::modified_bartlett(), TruncationRule{0.9}, bad),
                  ConfigError);
  std::vector<std::size_t> empty;
  CHECK_THROWS_AS(condition_diagnostics(LagWindow::modified_bartlett(), TruncationRule{}, empty),
                  ConfigError);
}
