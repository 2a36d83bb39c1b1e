#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "selectlik/asymptotics.hpp"
#include "selectlik/errors.hpp"
#include "selectlik/model.hpp"

using namespace selectlik;

namespace {

double witness_oracle(double x, double n, double c, double a, double b) {
  if (!(x >= a && x < b)) return -oracle::kInf;
  const double s = std::sqrt(n + c);
  const double hi = b == oracle::kInf ? b : (b + n) / s;
  return oracle::norm_logpdf(x, -n, s) - oracle::log_cdf_diff((a + n) / s, hi);
}

double sup_error_oracle(double n, double c, double a, double b) {
  double worst = 0.0;
  for (double x : witness_grid(a, b)) {
    if (x >= b) continue;
    const double e = b == oracle::kInf ? std::exp(a - x) : std::exp(-x) / (std::exp(-a) - std::exp(-b));
    worst = std::max(worst, std::abs(std::exp(witness_oracle(x, n, c, a, b)) - e));
  }
  return worst;
}

const std::vector<double> kDecades{10.0, 100.0, 1000.0, 10000.0};

}  // namespace

TEST_CASE("truncated_exponential_logpdf") {
  for (double x : {0.0, 0.3, 4.0}) CHECK(truncated_exponential_logpdf(x, 0.0) == doctest::Approx(-x));
  CHECK(truncated_exponential_logpdf(2.0, 1.96) == doctest::Approx(-0.04).epsilon(1e-12));
  CHECK(truncated_exponential_logpdf(1.0, 1.96) == kLogZero);
  CHECK(truncated_exponential_logpdf(3.0, 1.64, 3.0) == kLogZero);
  CHECK_THROWS_AS(truncated_exponential_logpdf(1.0, 2.0, 2.0), InvalidInput);
  for (auto [a, b] : std::vector<std::pair<double, double>>{{0.0, kInf}, {1.64, 1.96}, {-3.0, 2.0}, {30.0, 30.001}}) {
    const double hi = std::isinf(b) ? a + 60.0 : b;
    const double mass = oracle::integrate([&](double x) { return std::exp(truncated_exponential_logpdf(x, a, b)); },
                                          {a, std::min(hi, a + 5.0), hi});
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("witness_logpdf matches the 50-digit oracle up to n = 1e6") {
  for (double n : {1.0, 10.0, 1e3, 1e4, 1e6}) {
    for (auto [a, b] : std::vector<std::pair<double, double>>{{1.96, kInf}, {1.64, 1.96}, {-1.0, 1.0}}) {
      for (double x : {a, 0.5 * (a + std::min(b, a + 4.0)), std::min(b, a + 4.0) - 1e-9}) {
        CAPTURE(n);
        CAPTURE(a);
        CAPTURE(x);
        const double got = witness_logpdf(x, WitnessSpec(n, 0.0, a, b));
        CHECK(std::isfinite(got));
        CHECK(got == doctest::Approx(witness_oracle(x, n, 0.0, a, b)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("witness density approaches the exponential limit") {
  CHECK(witness_logpdf(2.0, WitnessSpec(1e6, 0.0, 1.96)) == doctest::Approx(-0.04).epsilon(2e-3 / 0.04));
  double gap = 0.0;
  for (double x = 1.96; x <= 6.96; x += 0.01) {
    gap = std::max(gap, std::abs(std::exp(witness_logpdf(x, WitnessSpec(1.0, 0.0, 1.96))) -
                                 std::exp(truncated_exponential_logpdf(x, 1.96))));
  }
  CHECK(gap > 0.05);
}

TEST_CASE("witness density integrates to one for every n") {
  for (double n : {1.0, 10.0, 1e4, 1e6}) {
    for (auto [a, b] : std::vector<std::pair<double, double>>{{1.96, kInf}, {1.64, 1.96}}) {
      const WitnessSpec spec(n, 3.0, a, b);
      const double hi = std::isinf(b) ? a + 80.0 : b;
      const double mass = oracle::integrate([&](double x) { return std::exp(witness_logpdf(x, spec)); },
                                            {a, std::min(hi, a + 3.0), std::min(hi, a + 15.0), hi});
      CAPTURE(n);
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("sup-error agrees with the oracle and shrinks by decade") {
  for (auto [a, b] : std::vector<std::pair<double, double>>{{1.96, kInf}, {1.64, 1.96}, {0.5, 3.0}, {-2.0, 1.0}}) {
    const auto rows = witness_convergence(a, b, 0.0, kDecades);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CAPTURE(a);
      CAPTURE(rows[i].n);
      CHECK(rows[i].sup_error == doctest::Approx(sup_error_oracle(rows[i].n, 0.0, a, b)).epsilon(1e-7));
      if (i > 0) CHECK(rows[i].sup_error < rows[i - 1].sup_error);
    }
  }
  const auto grid = witness_grid(1.96);
  const double e4 = witness_sup_error(WitnessSpec(1e4, 0.0, 1.96), grid);
  CHECK(e4 < 1e-2);
  const double e4c = witness_sup_error(WitnessSpec(1e4, 7.0, 1.96), grid);
  CHECK(std::max(e4, e4c) / std::min(e4, e4c) < 10.0);

  std::vector<double> padded{0.0, 1.0, 1.5};
  padded.insert(padded.end(), grid.begin(), grid.end());
  CHECK(witness_sup_error(WitnessSpec(1e4, 0.0, 1.96), padded) == e4);
}

TEST_CASE("witness grid and spec validation") {
  const auto g = witness_grid(1.64, 1.96);
  CHECK(g.size() == 2001);
  CHECK(g.front() == 1.64);
  CHECK(g.back() == 1.96);
  CHECK(witness_grid(1.96).back() == doctest::Approx(21.96));
  CHECK_THROWS_AS(WitnessSpec(0.0, 0.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(WitnessSpec(1.0, -2.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(WitnessSpec(1.0, 0.0, 2.0, 1.0), InvalidInput);
}

TEST_CASE("mills_ratio_check") {
  CHECK(mills_ratio_check(1.0) == doctest::Approx(0.655).epsilon(1e-3 / 0.655));
  CHECK(mills_ratio_check(1.0) ==
        doctest::Approx(std::exp(oracle::log_ccdf(1.0) - oracle::norm_logpdf(1.0, 0.0, 1.0))).epsilon(1e-13));
  CHECK(std::abs(mills_ratio_check(10.0) - 1.0) < 0.01);
  double prev = 0.0;
  for (double x = 1.0; x <= 40.0; x += 0.5) {
    const double r = mills_ratio_check(x);
    CHECK(r > prev);
    CHECK(r < 1.0);
    prev = r;
  }
  CHECK(mills_ratio_check(1e-3) > 0.0);
  CHECK_THROWS_AS(mills_ratio_check(0.0), InvalidInput);
}

TEST_CASE("limit_loglik") {
  const std::vector<double> two_bands{0.0, 0.025, 1.0};
  const std::vector<StudyObservation> data{{2.5, 1.0}, {0.9, 0.4}, {3.1, 0.5}};

  SUBCASE("one surviving band is a sum of truncated exponentials") {
    double ref = 0.0;
    for (const auto& s : data) ref += truncated_exponential_logpdf(s.effect(), s.se() * oracle::z_cut(0.025));
    const LogSelection sel(two_bands, {0.0, kLogZero});
    CHECK(limit_loglik(data, sel).value == doctest::Approx(ref).epsilon(1e-13));
    CHECK(limit_loglik(data, sel, LimitWeights::equal).value == doctest::Approx(ref).epsilon(1e-13));
    CHECK(profile_limit_loglik(data, two_bands).value == doctest::Approx(ref).epsilon(1e-13));
  }

  SUBCASE("last-band studies vanish") {
    auto more = data;
    more.emplace_back(0.1, 1.0);
    const auto lim = limit_loglik(more, LogSelection(two_bands, {0.0, kLogZero}));
    CHECK(lim.value == kLogZero);
    CHECK(lim.vanished_studies == std::vector<std::size_t>{3});
    CHECK(profile_limit_loglik(more, two_bands).vanished_studies == std::vector<std::size_t>{3});
  }

  SUBCASE("order invariance and profile dominance") {
    const std::vector<double> cuts{0.0, 0.025, 0.05, 1.0};
    const std::vector<StudyObservation> d3{{2.5, 1.0}, {1.8, 1.0}, {0.9, 0.4}, {0.72, 0.4}, {3.1, 0.5}};
    auto rev = d3;
    std::reverse(rev.begin(), rev.end());
    const LogSelection sel(cuts, {0.0, std::log(0.6), kLogZero});
    CHECK(limit_loglik(d3, sel).value == doctest::Approx(limit_loglik(rev, sel).value).epsilon(1e-14));
    const double prof = profile_limit_loglik(d3, cuts).value;
    CHECK(prof == doctest::Approx(profile_limit_loglik(rev, cuts).value).epsilon(1e-12));
    for (double w : {1.0, 0.8, 0.5, 0.2, 0.05}) {
      CHECK(prof >= limit_loglik(d3, LogSelection(cuts, {0.0, std::log(w), kLogZero})).value - 1e-9);
    }
  }

  SUBCASE("the ray log-likelihood converges to the limit") {
    const std::vector<double> cuts{0.0, 0.025, 0.05, 1.0};
    const std::vector<StudyObservation> d3{{2.5, 1.0}, {1.8, 1.0}, {0.9, 0.4}, {0.72, 0.4}, {3.1, 0.5}};
    const LogSelection sel(cuts, {0.0, std::log(0.6), kLogZero});
    const double lim = limit_loglik(d3, sel).value;
    std::vector<double> ray;
    for (double n : {100.0, 300.0, 1e3, 3e3, 1e4, 1e5}) ray.push_back(log_likelihood(d3, -n, std::sqrt(n), sel));
    const double dir = ray[1] - ray[0];
    for (std::size_t i = 1; i < ray.size(); ++i) CHECK((ray[i] - ray[i - 1]) * dir > 0.0);
    CHECK(std::abs(log_likelihood(d3, -1e4, 100.0, sel) - lim) < 0.01);
  }

  CHECK_THROWS_AS(limit_loglik(data, LogSelection()), InvalidInput);
  CHECK_THROWS_AS(limit_loglik(std::vector<StudyObservation>{}, LogSelection(two_bands, {0.0, -1.0})),
                  InvalidInput);
}
