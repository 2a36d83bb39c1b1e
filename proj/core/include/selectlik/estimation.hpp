#pragma once

// Maximum likelihood, likelihood grids, likelihood-ratio regions and the
// witness-ray diameter probe.
//
// Every routine takes a SelectionMode. With FixedSelection the weights are
// known constants. With ProfiledSelection only the cuts are known and the
// likelihood at each (theta0, tau) is maximised over all admissible weights,
// including the boundary where trailing weights are zero.
//
// The chi-square calibration of the regions below is the usual asymptotic
// one. Along the witness ray the likelihood of a censored data set can stay
// within the threshold forever, so these regions are demonstrators of that
// failure rather than confidence sets with guaranteed coverage.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "selectlik/errors.hpp"
#include "selectlik/model.hpp"
#include "selectlik/optimize.hpp"

namespace selectlik {

struct FixedSelection {
  LogSelection selection;
};

struct ProfiledSelection {
  std::vector<double> cuts;
};

using SelectionMode = std::variant<FixedSelection, ProfiledSelection>;

/// Cuts of either mode.
std::span<const double> mode_cuts(const SelectionMode& mode);

/// Log-likelihood at (theta0, tau) under the mode, and the weights used.
struct ModePoint {
  double loglik;
  LogSelection selection;
};

/// Evaluates log-likelihoods of one data set under one selection mode.
class LikelihoodSurface {
 public:
  LikelihoodSurface(std::span<const StudyObservation> data, SelectionMode mode);

  double operator()(double theta0, double tau) const;
  ModePoint point(double theta0, double tau) const;

  std::span<const StudyObservation> data() const noexcept { return data_; }
  const SelectionMode& mode() const noexcept { return mode_; }
  bool profiled() const noexcept { return std::holds_alternative<ProfiledSelection>(mode_); }

 private:
  std::vector<StudyObservation> data_;
  SelectionMode mode_;
  LogSelection shape_;
  std::vector<std::size_t> bands_;
};

struct FitOptions {
  std::size_t starts = 8;
  NelderMeadOptions optimizer{};
  /// Smallest tau the exp-reparameterisation reaches; tau = 0 is then
  /// checked directly as a boundary candidate.
  double tau_floor = 1e-8;
};

struct FitResult {
  double theta0 = 0.0;
  double tau = 0.0;
  LogSelection selection;
  double loglik_hat = 0.0;
  bool converged = false;
  std::size_t n_restarts_used = 0;
  /// Euclidean norm of the finite-difference gradient in (theta0, log tau).
  double gradient_norm_at_opt = 0.0;
};

/// Every restart hit the evaluation limit; carries the best point found.
class NonConvergence : public Error {
 public:
  explicit NonConvergence(FitResult best)
      : Error("maximum likelihood search did not converge"), best_(std::move(best)) {}
  const FitResult& best() const noexcept { return best_; }

 private:
  FitResult best_;
};

/// Multi-start simplex search over theta0 in R and tau >= 0 (and the weights
/// when profiled). Needs at least two studies; profiled mode needs K >= 2.
FitResult fit_mle(std::span<const StudyObservation> data, const SelectionMode& mode,
                  const FitOptions& options = {});

/// Like fit_mle but returns the best point instead of throwing NonConvergence.
FitResult fit_mle_best_effort(std::span<const StudyObservation> data, const SelectionMode& mode,
                              const FitOptions& options = {});

struct AxisSpec {
  double lo;
  double hi;
  std::size_t points;

  std::vector<double> values() const;
};

struct LogLikGrid {
  std::vector<double> theta_axis;
  std::vector<double> tau_axis;
  /// Row-major: values[i * tau_axis.size() + j] is at (theta_axis[i], tau_axis[j]).
  std::vector<double> values;
  SelectionMode mode;

  double at(std::size_t i, std::size_t j) const { return values[i * tau_axis.size() + j]; }
  double max() const;
};

/// Dense evaluation of the log-likelihood; cells are independent.
LogLikGrid loglik_grid(std::span<const StudyObservation> data, const AxisSpec& theta,
                       const AxisSpec& tau, const SelectionMode& mode);

struct RidgeEstimate {
  double slope;
  double intercept;
  /// (|theta0|, argmax tau) pairs entering the regression.
  std::vector<std::pair<double, double>> crest;
};

/// Fits log tau* = a + slope log|theta0| over grid columns with |theta0| >= 5
/// that meet the superlevel set {loglik >= max - level_offset}; tau* is the
/// column's maximising tau. Throws NoRidge when fewer than two such columns
/// have tau* > 0. The level is taken from loglik_hat when it exceeds the
/// grid maximum.
RidgeEstimate ridge_slope(const LogLikGrid& grid, double level_offset = 2.0,
                          std::optional<double> loglik_hat = std::nullopt);

/// chi-square quantile with `df` degrees of freedom at probability `level`.
double chi2_threshold(double level, double df = 2.0);

struct ProbePoint {
  double n;
  double theta0;
  double tau;
  double loglik;
  bool accepted;
};

struct RegionProbeReport {
  double level = 0.95;
  double chi2_threshold = 0.0;
  double loglik_hat = 0.0;
  std::vector<ProbePoint> probed_ray;
  /// Largest accepted n; nullopt with `unbounded` false means none accepted.
  std::optional<double> max_accepted_n;
  /// The limiting log-likelihood is itself inside the threshold, so every
  /// sufficiently large n is accepted.
  bool unbounded = false;
  /// sqrt(theta0^2 + tau^2) of the largest accepted probe; 0 when none.
  double diameter_lower_bound = 0.0;
  /// Limit of the log-likelihood along the ray (kLogZero when it diverges).
  double limit_loglik = kLogZero;
  std::vector<std::size_t> vanished_studies;
};

std::vector<double> default_probe_n();

/// Evaluates the log-likelihood at (theta0 = -n, tau = sqrt(n)) and marks
/// acceptance against 2 (loglik_hat - loglik) <= chi2(df = 2, level).
RegionProbeReport diameter_probe(std::span<const StudyObservation> data, double loglik_hat,
                                 const SelectionMode& mode, double level,
                                 std::span<const double> n_values);

struct ConfidenceRegion {
  LogLikGrid grid;
  /// accepted[i * tau_points + j] mirrors grid.values.
  std::vector<unsigned char> accepted;
  FitResult fit;
  RegionProbeReport probe;
};

struct RegionGridSpec {
  AxisSpec theta{-5.0, 5.0, 41};
  AxisSpec tau{0.0, 5.0, 21};
};

/// Joint likelihood-ratio region for (theta0, tau) on a grid plus the
/// witness-ray probe. loglik_hat is the best of the fit, the grid and the probes.
ConfidenceRegion lr_confidence_region(std::span<const StudyObservation> data, double level,
                                      const SelectionMode& mode, const RegionGridSpec& grid,
                                      std::span<const double> n_values);

/// Profile log-likelihood of theta0 (maximised over tau, and weights when profiled).
double profile_loglik_theta(const LikelihoodSurface& surface, double theta0,
                            double tau_start = 0.1);

struct ProfileInterval {
  double lo;
  double hi;
  bool finite() const;
};

/// {theta0 : 2 (loglik_hat - profile(theta0)) <= chi2(df = 1, level)}.
/// Endpoints are searched out to `search_radius` from the fit; an endpoint
/// that never crosses is reported as -inf / +inf.
ProfileInterval profile_interval_theta(std::span<const StudyObservation> data,
                                       const SelectionMode& mode, const FitResult& fit,
                                       double level = 0.95, double search_radius = 1e3);

/// 1 / sqrt(observed information) of the profile likelihood of theta0.
double theta_standard_error(std::span<const StudyObservation> data, const SelectionMode& mode,
                            const FitResult& fit);

}  // namespace selectlik
