#include "selectlik/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "selectlik/errors.hpp"
#include "selectlik/parallel.hpp"

namespace selectlik {
namespace {

std::vector<double> trapezoid_weights(std::span<const double> axis) {
  std::vector<double> w(axis.size(), 0.0);
  for (std::size_t i = 0; i + 1 < axis.size(); ++i) {
    const double h = axis[i + 1] - axis[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

void check_prior(const PriorSpec& prior) {
  if (!(prior.theta_sd > 0.0)) throw InvalidInput("prior sd for theta0 must be positive");
  if (!(prior.tau_scale > 0.0)) throw InvalidInput("half-normal scale must be positive");
}

}  // namespace

double log_prior(double theta0, double tau, const PriorSpec& prior) {
  check_prior(prior);
  if (tau < 0.0) return kLogZero;
  return normal::logpdf(theta0, prior.theta_mean, prior.theta_sd) + std::numbers::ln2 +
         normal::logpdf(tau, 0.0, prior.tau_scale);
}

double log_posterior(double theta0, double tau, std::span<const StudyObservation> data,
                     const LogSelection& selection, const PriorSpec& prior) {
  const double lp = log_prior(theta0, tau, prior);
  if (lp == kLogZero) return kLogZero;
  return log_likelihood(data, theta0, tau, selection) + lp;
}

double log_posterior(const ModelParams& params, std::span<const StudyObservation> data,
                     const PriorSpec& prior) {
  return log_posterior(params.theta0, params.tau, data, LogSelection(params.steps), prior);
}

double PosteriorGrid::total_mass() const {
  const auto wt = trapezoid_weights(theta_axis);
  const auto wu = trapezoid_weights(tau_axis);
  double total = 0.0;
  for (std::size_t i = 0; i < theta_axis.size(); ++i) {
    for (std::size_t j = 0; j < tau_axis.size(); ++j) {
      total += wt[i] * wu[j] * std::exp(at(i, j) - normalizer);
    }
  }
  return total;
}

CredibleInterval credible_interval(std::span<const double> axis, std::span<const double> density,
                                   double mass) {
  if (axis.size() != density.size() || axis.size() < 2) {
    throw InvalidInput("credible_interval: axis and density must match and hold two points");
  }
  if (!(mass > 0.0 && mass < 1.0)) throw InvalidInput("credible mass must lie in (0, 1)");
  std::vector<double> cdf(axis.size(), 0.0);
  for (std::size_t i = 1; i < axis.size(); ++i) {
    cdf[i] = cdf[i - 1] + 0.5 * (density[i] + density[i - 1]) * (axis[i] - axis[i - 1]);
  }
  const double total = cdf.back();
  if (!(total > 0.0)) throw InvalidInput("credible_interval: density has no mass");
  auto inverse = [&](double p) {
    const double target = p * total;
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
    if (it == cdf.begin()) return axis.front();
    if (it == cdf.end()) return axis.back();
    const std::size_t i = static_cast<std::size_t>(it - cdf.begin());
    const double span = cdf[i] - cdf[i - 1];
    const double frac = span > 0.0 ? (target - cdf[i - 1]) / span : 0.0;
    return axis[i - 1] + frac * (axis[i] - axis[i - 1]);
  };
  const double tail = 0.5 * (1.0 - mass);
  return {inverse(tail), inverse(1.0 - tail)};
}

PosteriorGrid grid_posterior(std::span<const StudyObservation> data, const LogSelection& selection,
                             const PosteriorGridSpec& spec, const PriorSpec& prior) {
  if (data.empty()) throw InvalidInput("posterior needs at least one study");
  if (spec.tau.lo < 0.0) throw InvalidInput("tau axis must be non-negative");
  check_prior(prior);

  PosteriorGrid g;
  g.theta_axis = spec.theta.values();
  g.tau_axis = spec.tau.values();
  g.mass = spec.mass;
  const std::size_t nth = g.theta_axis.size();
  const std::size_t nt = g.tau_axis.size();
  g.log_post.resize(nth * nt);
  parallel_for(g.log_post.size(), [&](std::size_t cell) {
    g.log_post[cell] =
        log_posterior(g.theta_axis[cell / nt], g.tau_axis[cell % nt], data, selection, prior);
  });

  const auto wt = trapezoid_weights(g.theta_axis);
  const auto wu = trapezoid_weights(g.tau_axis);

  // Two-pass log-sum-exp over cells in row-major order.
  std::size_t mode_cell = 0;
  for (std::size_t c = 1; c < g.log_post.size(); ++c) {
    if (g.log_post[c] > g.log_post[mode_cell]) mode_cell = c;
  }
  g.mode_log_post = g.log_post[mode_cell];
  g.mode_theta = g.theta_axis[mode_cell / nt];
  g.mode_tau = g.tau_axis[mode_cell % nt];
  if (!std::isfinite(g.mode_log_post)) throw InvalidInput("posterior is zero on the whole grid");

  double acc = 0.0;
  double boundary = 0.0;
  g.theta_marginal.assign(nth, 0.0);
  g.tau_marginal.assign(nt, 0.0);
  std::vector<double> dens(g.log_post.size());
  for (std::size_t i = 0; i < nth; ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      const std::size_t c = i * nt + j;
      dens[c] = std::exp(g.log_post[c] - g.mode_log_post);
      const double cell_mass = wt[i] * wu[j] * dens[c];
      acc += cell_mass;
      // tau = 0 is the edge of the parameter space, not a truncation.
      if (i == 0 || i + 1 == nth || j + 1 == nt) boundary += cell_mass;
    }
  }
  g.normalizer = g.mode_log_post + std::log(acc);
  if (boundary / acc > 0.99) {
    throw GridTooSmall("more than 99% of posterior mass lies on the grid boundary");
  }

  for (std::size_t i = 0; i < nth; ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      const double p = dens[i * nt + j] / acc;
      g.theta_marginal[i] += wu[j] * p;
      g.tau_marginal[j] += wt[i] * p;
    }
  }
  g.theta_interval = credible_interval(g.theta_axis, g.theta_marginal, g.mass);
  g.tau_interval = credible_interval(g.tau_axis, g.tau_marginal, g.mass);
  return g;
}

}  // namespace selectlik
