#include "selectlik/sampling.hpp"

#include <cmath>
#include <numeric>

#include "selectlik/errors.hpp"
#include "selectlik/normal.hpp"
#include "selectlik/parallel.hpp"

namespace selectlik {
namespace {

std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t index) {
  return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(index),
                       static_cast<std::uint32_t>(index >> 32)};
}

void validate(const SimulationConfig& config) {
  if (config.sigmas.empty()) throw InvalidInput("simulation needs at least one standard error");
  for (double s : config.sigmas) {
    if (!(s > 0.0) || !std::isfinite(s)) throw InvalidInput("standard errors must be positive");
  }
  if (config.max_rejections_per_study == 0) {
    throw InvalidInput("max_rejections_per_study must be positive");
  }
}

}  // namespace

StudyStream::StudyStream(std::uint64_t seed, std::uint64_t index) {
  auto seq = make_seed_seq(seed, index);
  engine_.seed(seq);
}

double StudyStream::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double StudyStream::normal() { return normal::quantile(uniform()); }

std::size_t SimulationOutput::total_attempts() const {
  return std::accumulate(attempts.begin(), attempts.end(), std::size_t{0});
}

double SimulationOutput::acceptance_rate() const {
  const std::size_t total = total_attempts();
  return total == 0 ? 0.0 : static_cast<double>(studies.size()) / static_cast<double>(total);
}

SimulationOutput simulate_hedges(const SimulationConfig& config) {
  validate(config);
  const auto& p = config.params;
  const std::size_t n = config.sigmas.size();
  std::vector<double> effects(n);
  std::vector<std::size_t> attempts(n, 0);

  parallel_for(n, [&](std::size_t i) {
    StudyStream stream(config.seed, i);
    const double sigma = config.sigmas[i];
    for (std::size_t a = 1; a <= config.max_rejections_per_study; ++a) {
      const double theta_i = p.theta0 + p.tau * stream.normal();
      const double x = theta_i + sigma * stream.normal();
      const double w = step_weight(p_value(x, sigma), p.steps);
      if (stream.uniform() < w) {
        effects[i] = x;
        attempts[i] = a;
        return;
      }
    }
    throw BudgetExceeded(i, config.max_rejections_per_study);
  });

  SimulationOutput out;
  out.studies.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.studies.emplace_back(effects[i], config.sigmas[i]);
  out.attempts = std::move(attempts);
  return out;
}

std::vector<StudyObservation> sample_hedges(const SimulationConfig& config) {
  return simulate_hedges(config).studies;
}

std::vector<StudyObservation> sample_basic(double theta0, double tau, double sigma,
                                           double alpha_cut, std::size_t n,
                                           std::uint64_t seed) {
  if (!(alpha_cut > 0.0 && alpha_cut < 1.0)) throw InvalidInput("alpha_cut must lie in (0, 1)");
  if (n == 0) throw InvalidInput("sample size must be at least 1");
  if (!(sigma > 0.0)) throw InvalidInput("standard error must be positive");
  if (!(tau >= 0.0)) throw InvalidInput("tau must be non-negative");

  const double c_alpha = normal::upper_quantile(alpha_cut);
  const double sd = std::hypot(tau, sigma);
  const double lower = (sigma * c_alpha - theta0) / sd;  // standardized truncation point
  const double log_mass = normal::log_ccdf(lower);
  if (log_mass < std::log(1e-300)) {
    throw Underflow("publishable mass below 1e-300; cannot sample the truncated model");
  }
  const double lower_cdf = normal::cdf(lower);

  StudyStream stream(seed, 0);
  std::vector<StudyObservation> out;
  out.reserve(n);
  while (out.size() < n) {
    const double u = stream.uniform();
    double z;
    if (lower > 0.0) {
      // Upper-tail inversion: Q(z) = u * Q(lower).
      z = normal::upper_quantile(std::exp(std::log(u) + log_mass));
    } else {
      z = normal::quantile(lower_cdf + u * (1.0 - lower_cdf));
    }
    const double x = theta0 + sd * z;
    // Rounding can land exactly on the cut; redraw those.
    if (std::isfinite(x) && x / sigma > c_alpha) out.emplace_back(x, sigma);
  }
  return out;
}

}  // namespace selectlik
