#include "selectlik/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "selectlik/errors.hpp"

namespace selectlik {
namespace {

void validate_cuts(std::span<const double> cuts) {
  if (cuts.size() < 2) throw InvalidInput("cuts: need at least the endpoints 0 and 1");
  if (cuts.front() != 0.0) throw InvalidInput("cuts: first cut must be exactly 0");
  if (cuts.back() != 1.0) throw InvalidInput("cuts: last cut must be exactly 1");
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    if (!(cuts[i] > cuts[i - 1])) throw InvalidInput("cuts: must be strictly increasing");
  }
}

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidInput("standard error must be positive and finite");
  }
}

void check_tau(double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw InvalidInput("tau must be non-negative and finite");
  }
}

// log P(band) and log of the normalizer for one study, filled into `band_mass`.
double band_masses(double theta0, double sd, double sigma, const LogSelection& sel,
                   std::vector<double>& band_mass) {
  const std::size_t k_count = sel.bands();
  band_mass.resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const double hi = (sigma * sel.z_cut(k) - theta0) / sd;
    const double lo = (sigma * sel.z_cut(k + 1) - theta0) / sd;
    band_mass[k] = normal::log_cdf_diff(lo, hi);
  }
  double acc = kLogZero;
  for (std::size_t k = 0; k < k_count; ++k) {
    if (sel.log_weight(k) == kLogZero) continue;
    acc = log_add_exp(acc, sel.log_weight(k) + band_mass[k]);
  }
  return acc;
}

double scaled_cut(double sigma, double z) {
  // +-inf stay infinite regardless of sigma.
  return std::isinf(z) ? z : sigma * z;
}

}  // namespace

StudyObservation::StudyObservation(double effect, double se) : effect_(effect), se_(se) {
  if (!std::isfinite(effect)) throw InvalidInput("study effect must be finite");
  check_sigma(se);
}

SelectionSteps::SelectionSteps(std::vector<double> cuts, std::vector<double> weights)
    : cuts_(std::move(cuts)), weights_(std::move(weights)) {
  validate_cuts(cuts_);
  if (weights_.size() + 1 != cuts_.size()) {
    throw InvalidInput("weights: need exactly one weight per band (cuts - 1)");
  }
  if (weights_.front() != 1.0) throw InvalidInput("weights: first weight must be exactly 1");
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    if (!(weights_[k] > 0.0 && weights_[k] <= 1.0)) {
      throw InvalidInput("weights: each weight must lie in (0, 1]");
    }
    if (k > 0 && weights_[k] > weights_[k - 1]) {
      throw InvalidInput("weights: must be non-increasing");
    }
  }
}

SelectionSteps SelectionSteps::unselected() { return SelectionSteps({0.0, 1.0}, {1.0}); }

LogSelection::LogSelection(std::vector<double> cuts, std::vector<double> log_weights)
    : cuts_(std::move(cuts)), log_weights_(std::move(log_weights)) {
  validate_cuts(cuts_);
  if (log_weights_.size() + 1 != cuts_.size()) {
    throw InvalidInput("weights: need exactly one weight per band (cuts - 1)");
  }
  if (log_weights_.front() != 0.0) throw InvalidInput("weights: first weight must be exactly 1");
  for (std::size_t k = 0; k < log_weights_.size(); ++k) {
    const double lw = log_weights_[k];
    if (std::isnan(lw) || lw > 0.0) throw InvalidInput("weights: each weight must lie in [0, 1]");
    if (k > 0 && lw > log_weights_[k - 1]) throw InvalidInput("weights: must be non-increasing");
  }
  z_cuts_.resize(cuts_.size());
  for (std::size_t j = 0; j < cuts_.size(); ++j) z_cuts_[j] = normal::upper_quantile(cuts_[j]);
}

LogSelection::LogSelection() : LogSelection({0.0, 1.0}, {0.0}) {}

LogSelection::LogSelection(const SelectionSteps& steps)
    : LogSelection(std::vector<double>(steps.cuts().begin(), steps.cuts().end()), [&] {
        std::vector<double> lw;
        lw.reserve(steps.bands());
        for (double w : steps.weights()) lw.push_back(std::log(w));
        return lw;
      }()) {}

std::size_t LogSelection::band_of_z(double z) const noexcept {
  // z_cuts_ is decreasing; band k is [z_cuts_[k+1], z_cuts_[k]).
  const std::size_t k_count = bands();
  for (std::size_t k = 0; k + 1 < k_count; ++k) {
    if (z >= z_cuts_[k + 1]) return k;
  }
  return k_count - 1;
}

std::size_t LogSelection::band_of(double x, double sigma) const noexcept {
  const std::size_t k_count = bands();
  for (std::size_t k = 0; k + 1 < k_count; ++k) {
    if (x >= scaled_cut(sigma, z_cuts_[k + 1])) return k;
  }
  return k_count - 1;
}

std::vector<double> LogSelection::weights() const {
  std::vector<double> w(log_weights_.size());
  std::transform(log_weights_.begin(), log_weights_.end(), w.begin(),
                 [](double lw) { return std::exp(lw); });
  return w;
}

LogSelection LogSelection::with_log_weights(std::vector<double> log_weights) const {
  LogSelection out = *this;
  if (log_weights.size() != log_weights_.size()) {
    throw InvalidInput("weights: need exactly one weight per band (cuts - 1)");
  }
  LogSelection checked(cuts_, log_weights);  // validation only
  out.log_weights_ = std::move(log_weights);
  return out;
}

ModelParams::ModelParams(double theta0_, double tau_, SelectionSteps steps_)
    : theta0(theta0_), tau(tau_), steps(std::move(steps_)) {
  if (!std::isfinite(theta0)) throw InvalidInput("theta0 must be finite");
  check_tau(tau);
}

double p_value(double x, double sigma) {
  check_sigma(sigma);
  const double u = normal::cdf(-x / sigma);
  constexpr double lo = std::numeric_limits<double>::denorm_min();
  constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  return std::clamp(u, lo, hi);
}

double step_weight(double u, const SelectionSteps& steps) {
  if (!(u > 0.0 && u <= 1.0)) throw InvalidInput("p-value must lie in (0, 1]");
  const auto cuts = steps.cuts();
  // First cut >= u closes the band on the right.
  const auto it = std::lower_bound(cuts.begin() + 1, cuts.end(), u);
  return steps.weights()[static_cast<std::size_t>(it - cuts.begin()) - 1];
}

double marginal_logpdf(double x, double theta0, double tau, double sigma) {
  check_sigma(sigma);
  check_tau(tau);
  return normal::logpdf(x, theta0, std::hypot(tau, sigma));
}

double basic_logpdf(double x, double theta0, double tau, double sigma, double alpha_cut) {
  check_sigma(sigma);
  check_tau(tau);
  if (!(alpha_cut > 0.0 && alpha_cut < 1.0)) throw InvalidInput("alpha_cut must lie in (0, 1)");
  const double c_alpha = normal::upper_quantile(alpha_cut);
  if (!(x / sigma > c_alpha)) return kLogZero;
  const double sd = std::hypot(tau, sigma);
  return normal::logpdf(x, theta0, sd) - normal::log_ccdf((sigma * c_alpha - theta0) / sd);
}

double truncated_normal_logpdf(double x, double mean, double sd, double a, double b) {
  if (!(sd > 0.0)) throw InvalidInput("sd must be positive");
  if (!(a < b)) throw InvalidInput("truncation interval must satisfy a < b");
  if (!(x >= a && x < b)) return kLogZero;
  const double log_sd = std::log(sd);
  double zx = (x - mean) / sd;
  double zl = (a - mean) / sd;
  double zh = (b - mean) / sd;
  if (zh < -5.0) {
    // Reflect the lower-tail window into the upper tail.
    const double l = -zh;
    zh = -zl;
    zl = l;
    zx = -zx;
  }
  if (zl > 5.0) {
    // Window far in a tail: express the density relative to phi(zl) so the
    // O(z^2) exponents cancel before exponentiation.
    const double d = (zh == kInf) ? kLogZero
                                  : -0.5 * (zh - zl) * (zh + zl) + normal::log_mills_ratio(zh) -
                                        normal::log_mills_ratio(zl);
    return -0.5 * (zx - zl) * (zx + zl) - normal::log_mills_ratio(zl) - log1mexp(d) - log_sd;
  }
  return normal::logpdf(zx) - log_sd - normal::log_cdf_diff(zl, zh);
}

void log_band_masses(double theta0, double tau, double sigma, const LogSelection& selection,
                     std::span<double> out) {
  check_sigma(sigma);
  check_tau(tau);
  if (out.size() != selection.bands()) throw InvalidInput("log_band_masses: output size mismatch");
  const double sd = std::hypot(tau, sigma);
  for (std::size_t k = 0; k < selection.bands(); ++k) {
    const double hi = (sigma * selection.z_cut(k) - theta0) / sd;
    const double lo = (sigma * selection.z_cut(k + 1) - theta0) / sd;
    out[k] = normal::log_cdf_diff(lo, hi);
  }
}

double log_selection_normalizer(double theta0, double tau, double sigma,
                                const LogSelection& selection) {
  check_sigma(sigma);
  check_tau(tau);
  std::vector<double> mass;
  return band_masses(theta0, std::hypot(tau, sigma), sigma, selection, mass);
}

MixtureDecomposition mixture_probabilities(double theta0, double tau, double sigma,
                                           const LogSelection& selection) {
  check_sigma(sigma);
  check_tau(tau);
  const double sd = std::hypot(tau, sigma);
  MixtureDecomposition out;
  std::vector<double> mass;
  out.log_normalizer = band_masses(theta0, sd, sigma, selection, mass);
  const std::size_t k_count = selection.bands();
  out.log_probs.resize(k_count);
  out.probs.resize(k_count);
  out.component_bounds.resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const double lw = selection.log_weight(k);
    out.log_probs[k] = (lw == kLogZero || mass[k] == kLogZero)
                           ? kLogZero
                           : lw + mass[k] - out.log_normalizer;
    out.probs[k] = std::exp(out.log_probs[k]);
    out.component_bounds[k] = {scaled_cut(sigma, selection.z_cut(k + 1)),
                               scaled_cut(sigma, selection.z_cut(k))};
  }
  return out;
}

MixtureDecomposition mixture_probabilities(const ModelParams& params, double sigma) {
  return mixture_probabilities(params.theta0, params.tau, sigma, LogSelection(params.steps));
}

double hedges_logpdf(double x, double theta0, double tau, double sigma,
                     const LogSelection& selection) {
  check_sigma(sigma);
  check_tau(tau);
  const double lw = selection.log_weight(selection.band_of(x, sigma));
  if (lw == kLogZero) return kLogZero;
  const double sd = std::hypot(tau, sigma);
  std::vector<double> mass;
  const double log_c = band_masses(theta0, sd, sigma, selection, mass);
  return lw + normal::logpdf(x, theta0, sd) - log_c;
}

double hedges_logpdf(double x, const ModelParams& params, double sigma) {
  return hedges_logpdf(x, params.theta0, params.tau, sigma, LogSelection(params.steps));
}

double log_likelihood(std::span<const StudyObservation> data, double theta0, double tau,
                      const LogSelection& selection) {
  if (data.empty()) throw InvalidInput("log-likelihood needs at least one study");
  check_tau(tau);
  if (!std::isfinite(theta0)) throw InvalidInput("theta0 must be finite");
  std::vector<double> mass;
  double total = 0.0;
  for (const auto& study : data) {
    const double sigma = study.se();
    const double lw = selection.log_weight(selection.band_of(study.effect(), sigma));
    if (lw == kLogZero) return kLogZero;
    const double sd = std::hypot(tau, sigma);
    const double log_c = band_masses(theta0, sd, sigma, selection, mass);
    total += lw + normal::logpdf(study.effect(), theta0, sd) - log_c;
  }
  return total;
}

double log_likelihood(std::span<const StudyObservation> data, const ModelParams& params) {
  return log_likelihood(data, params.theta0, params.tau, LogSelection(params.steps));
}

}  // namespace selectlik
