#include "doctest.h"

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "selectlik/bayes.hpp"
#include "selectlik/errors.hpp"
#include "selectlik/sampling.hpp"

using namespace selectlik;

namespace {

const std::vector<double> kPaperCuts{0.0, 0.025, 0.05, 1.0};
const SelectionSteps kPaper(kPaperCuts, {1.0, 0.6, 0.1});

std::vector<StudyObservation> simulate(const SelectionSteps& steps, std::size_t n, double sigma,
                                       std::uint64_t seed) {
  return sample_hedges({ModelParams(0.5, 0.2, steps), std::vector<double>(n, sigma), seed});
}

}  // namespace

TEST_CASE("log_prior") {
  const double lphi0 = oracle::norm_logpdf(0.0, 0.0, 1.0);
  CHECK(log_prior(0.0, 0.0) == doctest::Approx(std::log(2.0) + 2.0 * lphi0).epsilon(1e-14));
  CHECK(log_prior(1.0, 2.0, {0.0, 1.0, 3.0}) ==
        doctest::Approx(oracle::norm_logpdf(1.0, 0.0, 1.0) + std::log(2.0) + oracle::norm_logpdf(2.0, 0.0, 3.0)));
  CHECK(log_prior(0.0, -1e-9) == kLogZero);
  CHECK_THROWS_AS(log_prior(0.0, 1.0, {0.0, 0.0, 1.0}), InvalidInput);
  CHECK_THROWS_AS(log_prior(0.0, 1.0, {0.0, 1.0, -1.0}), InvalidInput);
}

TEST_CASE("log_posterior adds the prior to the likelihood") {
  const auto d = simulate(kPaper, 10, 0.3, 1);
  const ModelParams p(0.2, 0.4, kPaper);
  CHECK(log_posterior(p, d) == doctest::Approx(log_likelihood(d, p) + log_prior(0.2, 0.4)).epsilon(1e-14));
  CHECK_THROWS_AS(log_posterior(p, std::vector<StudyObservation>{}), InvalidInput);
}

TEST_CASE("grid posterior on uncensored data") {
  const auto d = simulate(SelectionSteps::unselected(), 200, 0.5, 2);
  const LogSelection none;
  const auto g = grid_posterior(d, none);
  CHECK(g.total_mass() == doctest::Approx(1.0).epsilon(1e-3));
  for (double v : g.theta_marginal) CHECK(v >= 0.0);
  for (double v : g.tau_marginal) CHECK(v >= 0.0);

  const auto fit = fit_mle(d, FixedSelection{none});
  CHECK(std::abs(g.mode_theta - fit.theta0) < 0.1);
  CHECK(std::abs(g.mode_tau - fit.tau) < 0.1);

  CHECK(g.theta_interval.lo > g.theta_axis.front());
  CHECK(g.theta_interval.hi < g.theta_axis.back());
  CHECK(g.theta_interval.lo < fit.theta0);
  CHECK(g.theta_interval.hi > fit.theta0);
}

TEST_CASE("credible intervals are nested in the mass and stable under grid widening") {
  const auto d = simulate(kPaper, 20, 0.3, 3);
  PosteriorGridSpec s90, s95, s99;
  s90.mass = 0.90;
  s99.mass = 0.99;
  const auto g90 = grid_posterior(d, kPaper, s90);
  const auto g95 = grid_posterior(d, kPaper, s95);
  const auto g99 = grid_posterior(d, kPaper, s99);
  CHECK(g99.theta_interval.lo <= g95.theta_interval.lo);
  CHECK(g95.theta_interval.lo <= g90.theta_interval.lo);
  CHECK(g90.theta_interval.hi <= g95.theta_interval.hi);
  CHECK(g95.theta_interval.hi <= g99.theta_interval.hi);

  // same spacing, twice the extent
  PosteriorGridSpec wide{{-10.0, 10.0, 799}, {0.0, 10.0, 799}, 0.95};
  const auto gw = grid_posterior(d, kPaper, wide);
  CHECK(std::abs(gw.theta_interval.lo - g95.theta_interval.lo) < 0.01);
  CHECK(std::abs(gw.theta_interval.hi - g95.theta_interval.hi) < 0.01);
}

TEST_CASE("the prior removes the ridge along the witness ray") {
  const auto d = simulate(kPaper, 20, 0.15, 1);
  const auto g = grid_posterior(d, kPaper);
  for (double n : {100.0, 1e3, 1e4}) {
    CHECK(log_posterior(-n, std::sqrt(n), d, kPaper) <= g.mode_log_post - 50.0);
  }
  // with the last band switched off the likelihood alone stays flat out there
  const LogSelection closure(kPaperCuts, {0.0, std::log(0.6), kLogZero});
  CHECK(log_posterior(-100.0, 10.0, d, closure) <= grid_posterior(d, closure).mode_log_post - 50.0);
}

TEST_CASE("posterior pinned against the grid edge is reported") {
  const auto d = simulate(SelectionSteps::unselected(), 200, 0.1, 4);
  const PosteriorGridSpec off_target{{-5.0, -4.0, 41}, {0.0, 0.5, 41}, 0.95};
  CHECK_THROWS_AS(grid_posterior(d, LogSelection(), off_target), GridTooSmall);
  CHECK_NOTHROW(grid_posterior(d, LogSelection(), PosteriorGridSpec{{-5.0, 5.0, 41}, {0.0, 5.0, 41}, 0.95}));
  CHECK_THROWS_AS(grid_posterior(std::vector<StudyObservation>{}, LogSelection()), InvalidInput);
}

TEST_CASE("credible_interval on a tabulated normal") {
  std::vector<double> axis, dens;
  for (int i = 0; i <= 2000; ++i) {
    const double x = -8.0 + 16.0 * i / 2000.0;
    axis.push_back(x);
    dens.push_back(std::exp(oracle::norm_logpdf(x, 0.0, 1.0)));
  }
  const auto ci = credible_interval(axis, dens, 0.95);
  CHECK(ci.lo == doctest::Approx(-1.959964).epsilon(1e-4));
  CHECK(ci.hi == doctest::Approx(1.959964).epsilon(1e-4));
  CHECK_THROWS_AS(credible_interval(axis, dens, 1.0), InvalidInput);
  CHECK_THROWS_AS(credible_interval(std::vector<double>{0.0}, std::vector<double>{1.0}, 0.5), InvalidInput);
}
