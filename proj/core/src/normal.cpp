#include "selectlik/normal.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/erf.hpp>

namespace selectlik {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kSqrt2 = 1.41421356237309504880;

// Beyond this point erfc starts losing to underflow; the continued
// fraction converges in a handful of terms here.
constexpr double kMillsSwitch = 30.0;

// Mills ratio R(x) = Q(x)/phi(x) by the classical continued fraction
// R(x) = 1/(x + 1/(x + 2/(x + 3/(x + ...)))), evaluated with modified Lentz.
double mills_continued_fraction(double x) noexcept {
  constexpr double tiny = 1e-300;
  double f = x;
  double c = f;
  double d = 0.0;
  for (int j = 1; j < 500; ++j) {
    d = x + j * d;
    if (d == 0.0) d = tiny;
    d = 1.0 / d;
    c = x + j / c;
    if (c == 0.0) c = tiny;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return 1.0 / f;
}

}  // namespace

namespace normal {

double logpdf(double x, double mean, double sd) noexcept {
  const double z = (x - mean) / sd;
  return logpdf(z) - std::log(sd);
}

double cdf(double z) noexcept { return 0.5 * std::erfc(-z * kInvSqrt2); }

double log_ccdf(double z) noexcept {
  if (std::isnan(z)) return z;
  if (z == kInf) return kLogZero;
  if (z < -3.0) return std::log1p(-0.5 * std::erfc(-z * kInvSqrt2));
  if (z < kMillsSwitch) return std::log(0.5 * std::erfc(z * kInvSqrt2));
  return logpdf(z) + std::log(mills_continued_fraction(z));
}

double log_cdf(double z) noexcept { return log_ccdf(-z); }

double log_mills_ratio(double z) noexcept {
  if (z >= kMillsSwitch) return std::log(mills_continued_fraction(z));
  return log_ccdf(z) - logpdf(z);
}

double log_cdf_diff(double lo, double hi) noexcept {
  if (!(lo < hi)) return kLogZero;
  if (hi <= 0.0) return log_cdf_diff(-hi, -lo);
  if (lo >= 0.0) {
    // Both bounds in the upper tail: Q(lo) - Q(hi) = Q(lo) (1 - Q(hi)/Q(lo)).
    const double log_upper = log_ccdf(lo);
    if (hi == kInf) return log_upper;
    double d;
    if (lo > 5.0) {
      // Ratio of tails written through the Mills ratio so that the two
      // O(z^2) exponents cancel analytically.
      d = -0.5 * (hi - lo) * (hi + lo) + log_mills_ratio(hi) - log_mills_ratio(lo);
    } else {
      d = log_ccdf(hi) - log_upper;
    }
    return log_upper + log1mexp(d);
  }
  // Straddles zero: neither tail is small, erf differences are accurate.
  const double mass = 0.5 * (std::erf(hi * kInvSqrt2) - std::erf(lo * kInvSqrt2));
  return std::log(mass);
}

double quantile(double p) {
  if (p <= 0.0) return -kInf;
  if (p >= 1.0) return kInf;
  if (p < 0.5) return -kSqrt2 * boost::math::erfc_inv(2.0 * p);
  return kSqrt2 * boost::math::erfc_inv(2.0 * (1.0 - p));
}

double upper_quantile(double q) {
  if (q <= 0.0) return kInf;
  if (q >= 1.0) return -kInf;
  return kSqrt2 * boost::math::erfc_inv(2.0 * q);
}

}  // namespace normal

double log1mexp(double d) noexcept {
  if (d > 0.0) return std::nan("");
  // Switch point from Maechler's note on computing log(1 - exp(-a)).
  if (d > -0.6931471805599453) return std::log(-std::expm1(d));
  return std::log1p(-std::exp(d));
}

double log_add_exp(double a, double b) noexcept {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

double log_sum_exp(std::span<const double> values) noexcept {
  double hi = kLogZero;
  for (double v : values) hi = std::max(hi, v);
  if (hi == kLogZero) return kLogZero;
  if (hi == kInf) return kInf;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - hi);
  return hi + std::log(acc);
}

}  // namespace selectlik
