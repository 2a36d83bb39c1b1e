#pragma once

// Maximisation of the selection-weight part of the likelihood.
//
// For fixed (theta0, tau) the log-likelihood splits as
//   sum_i log phi_i + sum_i [ lw[k_i] - log sum_j exp(lw[j] + M[i][j]) ],
// where M[i][j] is the log mass of band j for study i and k_i is the band
// holding study i. The second term is concave in the log weights lw, and the
// admissible set (lw[0] = 0, non-increasing, lw <= 0) is convex, so the
// maximum is unique. It may sit on the boundary where trailing weights are
// exactly zero; each such tail pattern is searched explicitly.

#include <cstddef>
#include <span>
#include <vector>

#include "selectlik/optimize.hpp"

namespace selectlik {

struct WeightProfile {
  /// Maximising log weights; trailing entries may be -inf.
  std::vector<double> log_weights;
  /// Value of the selection term at the maximum.
  double value = 0.0;
};

/// Selection term for given log weights. `log_band_mass` is row-major
/// (studies x bands).
double selection_term(std::span<const double> log_band_mass,
                      std::span<const std::size_t> study_bands, std::span<const double> log_weights);

/// Maximises selection_term over admissible log weights for `bands` bands.
WeightProfile profile_log_weights(std::span<const double> log_band_mass,
                                  std::span<const std::size_t> study_bands, std::size_t bands,
                                  const NelderMeadOptions& options = {1e-9, 1e-12, 4000, 1.0});

/// Maps unconstrained increments to log weights:
/// lw[0] = 0, lw[k] = lw[k-1] - softplus(xi[k-1]).
std::vector<double> log_weights_from_increments(std::span<const double> increments);

}  // namespace selectlik
