#include "selectlik/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "selectlik/errors.hpp"
#include "selectlik/profile.hpp"

namespace selectlik {
namespace {

// log(exp(-a) - exp(-b)) for a < b.
double log_exp_band(double a, double b) {
  if (b == kInf) return -a;
  return -a + log1mexp(a - b);
}

struct SurvivingBands {
  std::vector<double> log_mass;  // studies x (K - 1), log(exp(-a) - exp(-b))
  std::vector<std::size_t> band;
  std::vector<std::size_t> vanished;
  double density_part = 0.0;     // sum of -x over studies
};

SurvivingBands surviving_bands(std::span<const StudyObservation> data, const LogSelection& sel) {
  if (data.empty()) throw InvalidInput("limit log-likelihood needs at least one study");
  const std::size_t k_count = sel.bands();
  if (k_count < 2) throw InvalidInput("limit log-likelihood needs at least two bands");
  const std::size_t kept = k_count - 1;
  SurvivingBands out;
  out.log_mass.resize(data.size() * kept);
  out.band.resize(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double sigma = data[i].se();
    for (std::size_t k = 0; k < kept; ++k) {
      const double a = sigma * sel.z_cut(k + 1);
      const double b = k == 0 ? kInf : sigma * sel.z_cut(k);
      out.log_mass[i * kept + k] = log_exp_band(a, b);
    }
    const std::size_t k = sel.band_of(data[i].effect(), sigma);
    out.band[i] = k;
    if (k == kept) {
      out.vanished.push_back(i);
      continue;
    }
    out.density_part -= data[i].effect();
  }
  return out;
}

}  // namespace

WitnessSpec::WitnessSpec(double n_, double c_, double a_, double b_) : n(n_), c(c_), a(a_), b(b_) {
  if (!(n > 0.0)) throw InvalidInput("witness n must be positive");
  if (!(n + c > 0.0)) throw InvalidInput("witness variance n + c must be positive");
  if (!(a < b)) throw InvalidInput("witness interval must satisfy a < b");
}

double truncated_exponential_logpdf(double x, double a, double b) {
  if (!(a < b)) throw InvalidInput("truncation interval must satisfy a < b");
  if (!(x >= a && x < b)) return kLogZero;
  return -x - log_exp_band(a, b);
}

double witness_logpdf(double x, const WitnessSpec& spec) {
  return truncated_normal_logpdf(x, -spec.n, std::sqrt(spec.n + spec.c), spec.a, spec.b);
}

std::vector<double> witness_grid(double a, double b, std::size_t points) {
  if (!(a < b)) throw InvalidInput("witness interval must satisfy a < b");
  if (points < 2) throw InvalidInput("witness grid needs at least two points");
  const double hi = std::min(b, a + 20.0);
  std::vector<double> grid(points);
  for (std::size_t j = 0; j < points; ++j) {
    grid[j] = a + (hi - a) * static_cast<double>(j) / static_cast<double>(points - 1);
  }
  return grid;
}

double witness_sup_error(const WitnessSpec& spec, std::span<const double> x_grid) {
  double worst = 0.0;
  for (double x : x_grid) {
    const double lw = witness_logpdf(x, spec);
    const double le = truncated_exponential_logpdf(x, spec.a, spec.b);
    if (lw == kLogZero && le == kLogZero) continue;
    worst = std::max(worst, std::abs(std::exp(lw) - std::exp(le)));
  }
  return worst;
}

std::vector<ConvergenceRow> witness_convergence(double a, double b, double c,
                                                std::span<const double> n_values) {
  const auto grid = witness_grid(a, b);
  std::vector<ConvergenceRow> rows;
  rows.reserve(n_values.size());
  for (double n : n_values) rows.push_back({n, witness_sup_error(WitnessSpec(n, c, a, b), grid)});
  return rows;
}

double mills_ratio_check(double x) {
  if (!(x > 0.0)) throw InvalidInput("mills_ratio_check needs x > 0");
  return x * std::exp(normal::log_mills_ratio(x));
}

LimitLogLik limit_loglik(std::span<const StudyObservation> data, const LogSelection& selection,
                         LimitWeights weights) {
  auto bands = surviving_bands(data, selection);
  LimitLogLik out;
  out.vanished_studies = std::move(bands.vanished);
  if (!out.vanished_studies.empty()) {
    out.value = kLogZero;
    return out;
  }
  std::vector<double> lw(selection.log_weights().begin(), selection.log_weights().end() - 1);
  if (weights == LimitWeights::equal) std::fill(lw.begin(), lw.end(), 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (lw[bands.band[i]] == kLogZero) out.vanished_studies.push_back(i);
  }
  if (!out.vanished_studies.empty()) {
    out.value = kLogZero;
    return out;
  }
  out.value = bands.density_part + selection_term(bands.log_mass, bands.band, lw);
  return out;
}

LimitLogLik profile_limit_loglik(std::span<const StudyObservation> data,
                                 std::span<const double> cuts) {
  const std::vector<double> cut_vec(cuts.begin(), cuts.end());
  const LogSelection shape(cut_vec, std::vector<double>(cut_vec.size() - 1, 0.0));
  auto bands = surviving_bands(data, shape);
  LimitLogLik out;
  out.vanished_studies = std::move(bands.vanished);
  if (!out.vanished_studies.empty()) {
    out.value = kLogZero;
    return out;
  }
  const auto prof = profile_log_weights(bands.log_mass, bands.band, shape.bands() - 1);
  out.value = bands.density_part + prof.value;
  return out;
}

}  // namespace selectlik
