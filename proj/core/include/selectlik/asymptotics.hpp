#pragma once

// Behaviour of the model along the witness ray theta0 = -n, tau^2 = n.
//
// A normal with mean -n and variance n + c, truncated to [a, b), converges
// pointwise to the exponential density exp(-x) truncated to [a, b) as n grows.
// On the ray each selected band of Hedges' model therefore flattens into a
// truncated exponential and the likelihood tends to a finite limit whenever
// the last (least significant) band can lose its weight.

#include <cstddef>
#include <span>
#include <vector>

#include "selectlik/model.hpp"

namespace selectlik {

/// Truncated normal with mean -n and variance n + c on [a, b).
struct WitnessSpec {
  WitnessSpec(double n, double c, double a, double b = kInf);

  double n;
  double c;
  double a;
  double b;
};

/// exp(-x) / (exp(-a) - exp(-b)) on [a, b); kLogZero outside.
double truncated_exponential_logpdf(double x, double a, double b = kInf);

double witness_logpdf(double x, const WitnessSpec& spec);

/// 2001 equally spaced points on [a, min(b, a + 20)].
std::vector<double> witness_grid(double a, double b = kInf, std::size_t points = 2001);

/// max over the grid of |witness density - truncated exponential density|.
double witness_sup_error(const WitnessSpec& spec, std::span<const double> x_grid);

struct ConvergenceRow {
  double n;
  double sup_error;
};

/// sup-error for each n on witness_grid(a, b).
std::vector<ConvergenceRow> witness_convergence(double a, double b, double c,
                                                std::span<const double> n_values);

/// x (1 - Phi(x)) / phi(x); tends to 1 from below.
double mills_ratio_check(double x);

/// How the surviving bands share mass in the limit.
enum class LimitWeights {
  /// pi_k proportional to rho_k (exp(-a_k) - exp(-b_k)): the actual limit of
  /// the model along the ray when the last band's weight vanishes.
  selection,
  /// pi_k = 1 / (K - 1) for every surviving band.
  equal,
};

struct LimitLogLik {
  double value = 0.0;
  /// Studies in the last band, or in a band whose limiting weight is zero.
  /// Any entry forces value to kLogZero.
  std::vector<std::size_t> vanished_studies;
};

/// Log-likelihood of the limiting truncated-exponential mixture. Bands are
/// mapped to the effect scale per study: band k of study i is
/// [se_i c_{k+1}, se_i c_k). Requires K >= 2.
LimitLogLik limit_loglik(std::span<const StudyObservation> data, const LogSelection& selection,
                         LimitWeights weights = LimitWeights::selection);

/// limit_loglik maximised over the selection weights of the surviving bands.
LimitLogLik profile_limit_loglik(std::span<const StudyObservation> data,
                                 std::span<const double> cuts);

}  // namespace selectlik
