#pragma once

// Reference computations for the tests. Nothing here calls into the
// library's own normal arithmetic: tails come from 50-digit erfc, integrals
// from Gauss-Kronrod, quantiles from boost's normal distribution.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using hp = boost::multiprecision::cpp_bin_float_50;

inline const double kInf = std::numeric_limits<double>::infinity();

inline hp hp_cdf(const hp& z) {
  return boost::math::erfc(-z / boost::multiprecision::sqrt(hp(2))) / 2;
}

inline double log_cdf(double z) {
  if (z == -kInf) return -kInf;
  if (z == kInf) return 0.0;
  return static_cast<double>(boost::multiprecision::log(hp_cdf(hp(z))));
}

inline double log_ccdf(double z) { return log_cdf(-z); }

// log(Phi(hi) - Phi(lo)) by 50-digit subtraction on the smaller-mass side.
inline double log_cdf_diff(double lo, double hi) {
  if (lo >= 0.0) std::swap(lo, hi), lo = -lo, hi = -hi;
  const hp a = lo == -kInf ? hp(0) : hp_cdf(hp(lo));
  const hp b = hi == kInf ? hp(1) : hp_cdf(hp(hi));
  return static_cast<double>(boost::multiprecision::log(b - a));
}

inline double norm_logpdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * M_PI);
}

// c_j = Phi^{-1}(1 - alpha_j) through boost's own quantile.
inline double z_cut(double alpha) {
  if (alpha <= 0.0) return kInf;
  if (alpha >= 1.0) return -kInf;
  return boost::math::quantile(boost::math::complement(boost::math::normal(), alpha));
}

// Step selection model written out by hand: density rho(u) phi(x) / c.
struct Hedges {
  double theta0;
  double tau;
  double sigma;
  std::vector<double> cuts;
  std::vector<double> weights;

  double sd() const { return std::sqrt(tau * tau + sigma * sigma); }

  // Effect-scale edge of cut j.
  double edge(std::size_t j) const {
    const double c = z_cut(cuts[j]);
    return std::isinf(c) ? c : sigma * c;
  }

  double weight_at(double x) const {
    // u in (alpha_k, alpha_{k+1}]  <=>  x in [edge(k+1), edge(k))
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      if (x >= edge(k + 1) && x < edge(k)) return weights[k];
    }
    return weights.back();
  }

  hp band_mass(std::size_t k) const {
    const hp s = sd();
    const double hi = edge(k);
    const double lo = edge(k + 1);
    const hp up = hi == kInf ? hp(1) : hp_cdf((hp(hi) - theta0) / s);
    const hp dn = lo == -kInf ? hp(0) : hp_cdf((hp(lo) - theta0) / s);
    return up - dn;
  }

  hp normalizer() const {
    hp c = 0;
    for (std::size_t k = 0; k < weights.size(); ++k) c += weights[k] * band_mass(k);
    return c;
  }

  double logpdf(double x) const {
    const double w = weight_at(x);
    if (w == 0.0) return -kInf;
    return std::log(w) + norm_logpdf(x, theta0, sd()) -
           static_cast<double>(boost::multiprecision::log(normalizer()));
  }

  double cdf(double x) const {
    const hp s = sd();
    hp acc = 0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      const double lo = edge(k + 1);
      const double hi = std::min(edge(k), x);
      if (!(hi > lo)) continue;
      const hp up = hi == kInf ? hp(1) : hp_cdf((hp(hi) - theta0) / s);
      const hp dn = lo == -kInf ? hp(0) : hp_cdf((hp(lo) - theta0) / s);
      acc += weights[k] * (up - dn);
    }
    return static_cast<double>(acc / normalizer());
  }

  // Same as cdf() in double precision through boost's normal distribution.
  double cdf_fast(double x) const {
    const boost::math::normal nd(theta0, sd());
    const double c = static_cast<double>(normalizer());
    double acc = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      const double lo = edge(k + 1);
      const double hi = std::min(edge(k), x);
      if (!(hi > lo)) continue;
      // tail differences on whichever side is smaller
      if (lo > theta0) {
        const double up = hi == kInf ? 0.0 : boost::math::cdf(boost::math::complement(nd, hi));
        acc += weights[k] * (boost::math::cdf(boost::math::complement(nd, lo)) - up);
      } else {
        const double up = hi == kInf ? 1.0 : boost::math::cdf(nd, hi);
        acc += weights[k] * (up - (lo == -kInf ? 0.0 : boost::math::cdf(nd, lo)));
      }
    }
    return acc / c;
  }

  // Band edges inside a window around the bulk, sorted.
  std::vector<double> breakpoints(double half_width_sd) const {
    std::vector<double> pts{theta0 - half_width_sd * sd(), theta0 + half_width_sd * sd()};
    for (std::size_t j = 1; j + 1 < cuts.size(); ++j) {
      const double e = edge(j);
      if (e > pts[0] && e < pts[1]) pts.push_back(e);
    }
    std::sort(pts.begin(), pts.end());
    return pts;
  }
};

// Adaptive Gauss-Kronrod over consecutive breakpoints.
inline double integrate(const std::function<double(double)>& f, const std::vector<double>& pts,
                        double tol = 1e-13) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (!(pts[i + 1] > pts[i])) continue;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, pts[i], pts[i + 1],
                                                                           15, tol);
  }
  return total;
}

// chi-square quantiles with closed forms.
inline double chi2_quantile_df2(double level) { return -2.0 * std::log1p(-level); }
inline double chi2_quantile_df1(double level) {
  const double z = z_cut((1.0 - level) / 2.0);
  return z * z;
}

// Kolmogorov limiting tail with Stephens' finite-n correction.
inline double kolmogorov_tail(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
  double statistic;
  double p_value;
};

inline KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  const double rn = std::sqrt(n);
  return {d, kolmogorov_tail((rn + 0.12 + 0.11 / rn) * d)};
}

}  // namespace oracle
