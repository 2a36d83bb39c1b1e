#pragma once

// Standard normal primitives evaluated in log space.
//
// Every routine here stays finite far into the tails: upper-tail
// probabilities beyond z = 30 come from a continued fraction for the Mills
// ratio instead of erfc, and probability differences are formed on the side
// of the distribution that carries the smaller mass.

#include <limits>
#include <numbers>
#include <span>

namespace selectlik {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
/// Log of an exact zero probability or density.
inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

namespace normal {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

/// log phi(z) for the standard normal.
inline double logpdf(double z) noexcept { return -0.5 * z * z - kLogSqrt2Pi; }

/// log phi(x; mean, sd).
double logpdf(double x, double mean, double sd) noexcept;

/// Phi(z).
double cdf(double z) noexcept;

/// log Phi(z).
double log_cdf(double z) noexcept;

/// log(1 - Phi(z)), accurate for large positive z.
double log_ccdf(double z) noexcept;

/// log of the Mills ratio (1 - Phi(z)) / phi(z).
double log_mills_ratio(double z) noexcept;

/// log(Phi(hi) - Phi(lo)) for lo <= hi; either bound may be infinite.
/// Returns kLogZero when lo == hi.
double log_cdf_diff(double lo, double hi) noexcept;

/// Phi^{-1}(p) for p in (0, 1); maps 0 and 1 to -inf and +inf.
double quantile(double p);

/// Phi^{-1}(1 - q), without forming 1 - q. Accurate for tiny q.
double upper_quantile(double q);

}  // namespace normal

/// log(1 - exp(d)) for d <= 0.
double log1mexp(double d) noexcept;

/// log(exp(a) + exp(b)).
double log_add_exp(double a, double b) noexcept;

/// log(sum exp(v)). Returns kLogZero on an empty or all-zero input.
double log_sum_exp(std::span<const double> values) noexcept;

}  // namespace selectlik
