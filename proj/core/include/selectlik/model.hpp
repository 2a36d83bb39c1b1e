#pragma once

// Domain types and exact densities for the random-effects meta-analysis
// model under one-sided p-value selection.
//
// Conventions used throughout the library:
//  * a study reports an effect x with known standard error sigma; its
//    one-sided p-value is u = Phi(-x / sigma);
//  * a step selection function is described by p-value cuts
//    0 = alpha_0 < alpha_1 < ... < alpha_K = 1 and per-band publication
//    weights rho_1 = 1 >= rho_2 >= ... >= rho_K;
//  * band k (0-based here) holds p-values in (alpha_k, alpha_{k+1}], which
//    is the z = x / sigma interval [c_{k+1}, c_k) with c_j = Phi^{-1}(1 - alpha_j).
//    Band 0 is the most significant band.

#include <cstddef>
#include <span>
#include <vector>

#include "selectlik/normal.hpp"

namespace selectlik {

/// One published study: effect estimate and its standard error.
class StudyObservation {
 public:
  StudyObservation(double effect, double se);

  double effect() const noexcept { return effect_; }
  double se() const noexcept { return se_; }

  friend bool operator==(const StudyObservation&, const StudyObservation&) = default;

 private:
  double effect_;
  double se_;
};

/// Step selection function with strictly positive weights.
class SelectionSteps {
 public:
  /// Throws InvalidInput naming the violated invariant.
  SelectionSteps(std::vector<double> cuts, std::vector<double> weights);

  /// A single band with weight one: no selection at all.
  static SelectionSteps unselected();

  std::size_t bands() const noexcept { return weights_.size(); }
  std::span<const double> cuts() const noexcept { return cuts_; }
  std::span<const double> weights() const noexcept { return weights_; }

  friend bool operator==(const SelectionSteps&, const SelectionSteps&) = default;

 private:
  std::vector<double> cuts_;
  std::vector<double> weights_;
};

/// Step selection held in log space.
///
/// Unlike SelectionSteps this admits weights that are exactly zero (log
/// weight -inf) in the trailing bands. That closure contains the
/// significance-only model and is where profiled likelihoods go along the
/// witness ray.
class LogSelection {
 public:
  /// No selection: a single band with weight one.
  LogSelection();
  LogSelection(std::vector<double> cuts, std::vector<double> log_weights);
  LogSelection(const SelectionSteps& steps);  // NOLINT: implicit by intent

  std::size_t bands() const noexcept { return log_weights_.size(); }
  std::span<const double> cuts() const noexcept { return cuts_; }
  std::span<const double> log_weights() const noexcept { return log_weights_; }
  double log_weight(std::size_t band) const noexcept { return log_weights_[band]; }

  /// c_j = Phi^{-1}(1 - alpha_j) for j = 0..K; c_0 = +inf and c_K = -inf.
  double z_cut(std::size_t j) const noexcept { return z_cuts_[j]; }

  /// Band containing the standardized effect z.
  std::size_t band_of_z(double z) const noexcept;

  /// Band of an effect x with standard error sigma, decided against the
  /// effect-scale edges sigma * c_j so it agrees with the mixture bounds.
  std::size_t band_of(double x, double sigma) const noexcept;

  /// Weights on the linear scale.
  std::vector<double> weights() const;

  /// Same cuts, new log weights (validated).
  LogSelection with_log_weights(std::vector<double> log_weights) const;

 private:
  std::vector<double> cuts_;
  std::vector<double> log_weights_;
  std::vector<double> z_cuts_;
};

/// (theta0, tau, rho): population effect, heterogeneity and selection.
struct ModelParams {
  ModelParams(double theta0, double tau, SelectionSteps steps);

  double theta0;
  double tau;
  SelectionSteps steps;
};

/// Half-open interval [lo, hi) on the effect scale.
struct Interval {
  double lo;
  double hi;
};

/// Hedges' density written as a mixture of truncated normals.
struct MixtureDecomposition {
  std::vector<double> probs;
  std::vector<double> log_probs;
  std::vector<Interval> component_bounds;
  /// log of the selection normalizer sum_k rho_k P(band k).
  double log_normalizer = 0.0;
};

/// One-sided p-value Phi(-x / sigma), clamped into (0, 1).
double p_value(double x, double sigma);

/// Publication weight rho_k of the band (alpha_{k-1}, alpha_k] holding u.
double step_weight(double u, const SelectionSteps& steps);

/// log phi(x; theta0, sqrt(tau^2 + sigma^2)).
double marginal_logpdf(double x, double theta0, double tau, double sigma);

/// Density when only results significant at alpha_cut are published.
/// Support is x / sigma > Phi^{-1}(1 - alpha_cut); kLogZero outside.
double basic_logpdf(double x, double theta0, double tau, double sigma, double alpha_cut);

/// Normal(mean, sd) truncated to [a, b). Throws InvalidInput when a >= b.
double truncated_normal_logpdf(double x, double mean, double sd, double a, double b);

MixtureDecomposition mixture_probabilities(const ModelParams& params, double sigma);
MixtureDecomposition mixture_probabilities(double theta0, double tau, double sigma,
                                           const LogSelection& selection);

/// log P(band k) for every band under N(theta0, sqrt(tau^2 + sigma^2)),
/// ignoring the weights. `out` must hold selection.bands() entries.
void log_band_masses(double theta0, double tau, double sigma, const LogSelection& selection,
                     std::span<double> out);

/// log of sum_k rho_k P(band k) under N(theta0, sqrt(tau^2 + sigma^2)):
/// the probability that a submitted study is published.
double log_selection_normalizer(double theta0, double tau, double sigma,
                                const LogSelection& selection);

double hedges_logpdf(double x, const ModelParams& params, double sigma);
double hedges_logpdf(double x, double theta0, double tau, double sigma,
                     const LogSelection& selection);

/// Sum of hedges_logpdf over the studies. Throws on empty data.
double log_likelihood(std::span<const StudyObservation> data, const ModelParams& params);
double log_likelihood(std::span<const StudyObservation> data, double theta0, double tau,
                      const LogSelection& selection);

}  // namespace selectlik
