#pragma once

// Grid-quadrature posterior for (theta0, tau) with the selection weights held
// fixed. Priors: theta0 ~ N(0, 1), tau ~ half-normal(scale). The normal prior
// on theta0 removes the likelihood ridge at large negative theta0, so the
// credible sets stay finite where likelihood-ratio regions do not.

#include <span>
#include <vector>

#include "selectlik/estimation.hpp"
#include "selectlik/model.hpp"

namespace selectlik {

struct PriorSpec {
  double theta_mean = 0.0;
  double theta_sd = 1.0;
  double tau_scale = 1.0;
};

/// log N(theta0; mean, sd) + log half-normal(tau; scale). kLogZero for tau < 0.
double log_prior(double theta0, double tau, const PriorSpec& prior = {});

/// log_likelihood + log_prior. Needs at least one study.
double log_posterior(double theta0, double tau, std::span<const StudyObservation> data,
                     const LogSelection& selection, const PriorSpec& prior = {});
double log_posterior(const ModelParams& params, std::span<const StudyObservation> data,
                     const PriorSpec& prior = {});

struct PosteriorGridSpec {
  AxisSpec theta{-5.0, 5.0, 400};
  AxisSpec tau{0.0, 5.0, 400};
  /// Probability mass of the equal-tailed credible intervals.
  double mass = 0.95;
};

struct CredibleInterval {
  double lo;
  double hi;
};

struct PosteriorGrid {
  std::vector<double> theta_axis;
  std::vector<double> tau_axis;
  /// Unnormalised log posterior, row-major like LogLikGrid.
  std::vector<double> log_post;
  /// log of the trapezoidal integral of exp(log_post).
  double normalizer = 0.0;
  /// Marginal posterior densities on the axes.
  std::vector<double> theta_marginal;
  std::vector<double> tau_marginal;
  double mass = 0.95;
  CredibleInterval theta_interval{};
  CredibleInterval tau_interval{};
  double mode_theta = 0.0;
  double mode_tau = 0.0;
  double mode_log_post = 0.0;

  double at(std::size_t i, std::size_t j) const { return log_post[i * tau_axis.size() + j]; }
  /// Trapezoidal integral of the normalised density; 1 up to rounding.
  double total_mass() const;
};

/// Evaluates the posterior on the grid and summarises it. Throws
/// GridTooSmall when more than 99% of the mass sits on the theta edges or
/// the upper tau edge.
PosteriorGrid grid_posterior(std::span<const StudyObservation> data, const LogSelection& selection,
                             const PosteriorGridSpec& grid = {}, const PriorSpec& prior = {});

/// Equal-tailed interval of a density tabulated on `axis` (trapezoidal CDF,
/// linear interpolation between nodes).
CredibleInterval credible_interval(std::span<const double> axis, std::span<const double> density,
                                   double mass);

}  // namespace selectlik
