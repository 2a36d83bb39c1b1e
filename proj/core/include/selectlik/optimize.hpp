#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace selectlik {

struct NelderMeadOptions {
  /// Converged once every vertex is within this distance (max-norm) of the best.
  double x_tolerance = 1e-8;
  /// ...and every vertex value is within this of the best value.
  double f_tolerance = 1e-10;
  std::size_t max_evaluations = 20000;
  /// Edge length of the initial simplex.
  double initial_step = 0.5;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  bool converged = false;
  std::size_t evaluations = 0;
};

/// Derivative-free simplex minimisation. Non-finite objective values count
/// as +inf, so the objective may signal "outside the domain" by returning NaN.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> start, const NelderMeadOptions& options = {});

/// Numerically stable log(1 + exp(x)).
double softplus(double x) noexcept;

/// Inverse of softplus for y > 0.
double inverse_softplus(double y) noexcept;

}  // namespace selectlik
