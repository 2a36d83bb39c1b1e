#include "selectlik/profile.hpp"

#include <algorithm>
#include <cmath>

#include "selectlik/errors.hpp"
#include "selectlik/normal.hpp"

namespace selectlik {

std::vector<double> log_weights_from_increments(std::span<const double> increments) {
  std::vector<double> lw(increments.size() + 1, 0.0);
  for (std::size_t k = 0; k < increments.size(); ++k) lw[k + 1] = lw[k] - softplus(increments[k]);
  return lw;
}

double selection_term(std::span<const double> log_band_mass,
                      std::span<const std::size_t> study_bands, std::span<const double> log_weights) {
  const std::size_t bands = log_weights.size();
  double total = 0.0;
  for (std::size_t i = 0; i < study_bands.size(); ++i) {
    const double own = log_weights[study_bands[i]];
    if (own == kLogZero) return kLogZero;
    const double* row = log_band_mass.data() + i * bands;
    double hi = kLogZero;
    for (std::size_t j = 0; j < bands; ++j) {
      if (log_weights[j] != kLogZero) hi = std::max(hi, log_weights[j] + row[j]);
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < bands; ++j) {
      if (log_weights[j] != kLogZero) acc += std::exp(log_weights[j] + row[j] - hi);
    }
    total += own - (hi + std::log(acc));
  }
  return total;
}

WeightProfile profile_log_weights(std::span<const double> log_band_mass,
                                  std::span<const std::size_t> study_bands, std::size_t bands,
                                  const NelderMeadOptions& options) {
  if (bands == 0) throw InvalidInput("profile_log_weights: no bands");
  if (log_band_mass.size() != study_bands.size() * bands) {
    throw InvalidInput("profile_log_weights: mass matrix does not match studies x bands");
  }
  std::size_t highest = 0;
  for (std::size_t b : study_bands) highest = std::max(highest, b);
  if (highest >= bands) throw InvalidInput("profile_log_weights: study band out of range");

  WeightProfile best;
  best.value = kLogZero;

  // `support` leading bands carry positive weight, the rest are zero.
  for (std::size_t support = highest + 1; support <= bands; ++support) {
    auto expand = [&](std::span<const double> xi) {
      std::vector<double> lw = log_weights_from_increments(xi);
      lw.resize(bands, kLogZero);
      return lw;
    };
    if (support == 1) {
      std::vector<double> lw(bands, kLogZero);
      lw[0] = 0.0;
      const double v = selection_term(log_band_mass, study_bands, lw);
      if (v > best.value) best = {std::move(lw), v};
      continue;
    }
    auto objective = [&](std::span<const double> xi) {
      return -selection_term(log_band_mass, study_bands, expand(xi));
    };
    for (double start : {0.0, -2.0}) {
      const auto fit = nelder_mead(objective, std::vector<double>(support - 1, start), options);
      const double v = -fit.value;
      if (v > best.value) best = {expand(fit.x), v};
    }
  }
  return best;
}

}  // namespace selectlik
