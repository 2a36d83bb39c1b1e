#include "selectlik/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/tools/roots.hpp>

#include "selectlik/asymptotics.hpp"
#include "selectlik/parallel.hpp"
#include "selectlik/profile.hpp"

namespace selectlik {
namespace {

LogSelection shape_of(const SelectionMode& mode) {
  if (const auto* fixed = std::get_if<FixedSelection>(&mode)) return fixed->selection;
  const auto& cuts = std::get<ProfiledSelection>(mode).cuts;
  if (cuts.size() < 2) throw InvalidInput("cuts: need at least the endpoints 0 and 1");
  return LogSelection(cuts, std::vector<double>(cuts.size() - 1, 0.0));
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

struct Start {
  double theta0;
  double tau;
};

// Lattice {m - 2s, m, m + 2s} x {0.01, s/2, 2s}, central points first.
std::vector<Start> start_lattice(std::span<const StudyObservation> data, std::size_t count) {
  std::vector<double> effects;
  std::vector<double> ses;
  for (const auto& s : data) {
    effects.push_back(s.effect());
    ses.push_back(s.se());
  }
  const double m = mean_of(effects);
  double ss = 0.0;
  for (double x : effects) ss += (x - m) * (x - m);
  double sd = effects.size() > 1 ? std::sqrt(ss / static_cast<double>(effects.size() - 1)) : 0.0;
  if (!(sd > 1e-8)) sd = mean_of(ses);

  const double thetas[] = {m, m - 2.0 * sd, m + 2.0 * sd};
  const double taus[] = {0.5 * sd, 0.01, 2.0 * sd};
  std::vector<Start> starts;
  for (double th : thetas) {
    for (double t : taus) starts.push_back({th, t});
  }
  starts.resize(std::min(count, starts.size()));
  return starts;
}

}  // namespace

std::span<const double> mode_cuts(const SelectionMode& mode) {
  if (const auto* fixed = std::get_if<FixedSelection>(&mode)) return fixed->selection.cuts();
  return std::get<ProfiledSelection>(mode).cuts;
}

LikelihoodSurface::LikelihoodSurface(std::span<const StudyObservation> data, SelectionMode mode)
    : data_(data.begin(), data.end()), mode_(std::move(mode)), shape_(shape_of(mode_)) {
  if (data_.empty()) throw InvalidInput("log-likelihood needs at least one study");
  bands_.reserve(data_.size());
  for (const auto& s : data_) bands_.push_back(shape_.band_of(s.effect(), s.se()));
}

ModePoint LikelihoodSurface::point(double theta0, double tau) const {
  if (!profiled()) return {log_likelihood(data_, theta0, tau, shape_), shape_};
  const std::size_t k_count = shape_.bands();
  std::vector<double> mass(data_.size() * k_count);
  double density = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const double sigma = data_[i].se();
    log_band_masses(theta0, tau, sigma, shape_,
                    std::span<double>(mass.data() + i * k_count, k_count));
    density += normal::logpdf(data_[i].effect(), theta0, std::hypot(tau, sigma));
  }
  auto prof = profile_log_weights(mass, bands_, k_count);
  return {density + prof.value, shape_.with_log_weights(std::move(prof.log_weights))};
}

double LikelihoodSurface::operator()(double theta0, double tau) const {
  return point(theta0, tau).loglik;
}

FitResult fit_mle_best_effort(std::span<const StudyObservation> data, const SelectionMode& mode,
                              const FitOptions& options) {
  if (data.size() < 2) throw InvalidInput("fit_mle needs at least two studies");
  if (std::holds_alternative<ProfiledSelection>(mode) && mode_cuts(mode).size() < 3) {
    throw InvalidInput("fitting free weights needs at least two bands");
  }
  if (!(options.tau_floor > 0.0)) throw InvalidInput("tau_floor must be positive");
  const LikelihoodSurface surface(data, mode);
  const double log_floor = std::log(options.tau_floor);

  auto tau_of = [&](double eta) { return std::exp(std::max(eta, log_floor)); };
  auto objective = [&](std::span<const double> v) { return -surface(v[0], tau_of(v[1])); };

  FitResult best;
  best.loglik_hat = kLogZero;
  std::vector<double> best_v;
  std::size_t runs = 0;
  for (const auto& start : start_lattice(data, std::max<std::size_t>(options.starts, 1))) {
    const auto nm = nelder_mead(objective, {start.theta0, std::log(start.tau)}, options.optimizer);
    ++runs;
    if (-nm.value > best.loglik_hat) {
      best.loglik_hat = -nm.value;
      best.theta0 = nm.x[0];
      best.tau = tau_of(nm.x[1]);
      best.converged = nm.converged;
      best_v = nm.x;
    }
  }
  best.n_restarts_used = runs;

  // tau = 0 lies in the parameter space but only in the limit of the
  // reparameterisation; compare it directly.
  NelderMeadOptions edge = options.optimizer;
  edge.initial_step = 0.1;
  const auto at_zero = nelder_mead([&](std::span<const double> v) { return -surface(v[0], 0.0); },
                                   {best.theta0}, edge);
  if (-at_zero.value >= best.loglik_hat) {
    best.loglik_hat = -at_zero.value;
    best.theta0 = at_zero.x[0];
    best.tau = 0.0;
    best.converged = best.converged || at_zero.converged;
    best_v = {best.theta0, log_floor};
  }

  best.selection = surface.point(best.theta0, best.tau).selection;

  double grad_sq = 0.0;
  for (std::size_t d = 0; d < 2; ++d) {
    const double h = 1e-5 * std::max(1.0, std::abs(best_v[d]));
    auto up = best_v;
    auto down = best_v;
    up[d] += h;
    down[d] -= h;
    const double g = (objective(down) - objective(up)) / (2.0 * h);
    if (std::isfinite(g)) grad_sq += g * g;
  }
  best.gradient_norm_at_opt = std::sqrt(grad_sq);
  return best;
}

FitResult fit_mle(std::span<const StudyObservation> data, const SelectionMode& mode,
                  const FitOptions& options) {
  auto best = fit_mle_best_effort(data, mode, options);
  if (!best.converged) throw NonConvergence(std::move(best));
  return best;
}

std::vector<double> AxisSpec::values() const {
  if (points < 2) throw InvalidInput("grid axes need at least two points");
  if (!(lo < hi)) throw InvalidInput("grid axis range must satisfy lo < hi");
  std::vector<double> v(points);
  for (std::size_t i = 0; i < points; ++i) {
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return v;
}

double LogLikGrid::max() const {
  double m = kLogZero;
  for (double v : values) m = std::max(m, v);
  return m;
}

LogLikGrid loglik_grid(std::span<const StudyObservation> data, const AxisSpec& theta,
                       const AxisSpec& tau, const SelectionMode& mode) {
  if (tau.lo < 0.0) throw InvalidInput("tau axis must be non-negative");
  const LikelihoodSurface surface(data, mode);
  LogLikGrid grid{theta.values(), tau.values(), {}, mode};
  const std::size_t nt = grid.tau_axis.size();
  grid.values.resize(grid.theta_axis.size() * nt);
  parallel_for(grid.values.size(), [&](std::size_t cell) {
    grid.values[cell] = surface(grid.theta_axis[cell / nt], grid.tau_axis[cell % nt]);
  });
  return grid;
}

RidgeEstimate ridge_slope(const LogLikGrid& grid, double level_offset,
                          std::optional<double> loglik_hat) {
  if (!(level_offset > 0.0)) throw InvalidInput("level_offset must be positive");
  const double level = std::max(grid.max(), loglik_hat.value_or(kLogZero)) - level_offset;
  const std::size_t nt = grid.tau_axis.size();
  RidgeEstimate out{0.0, 0.0, {}};
  for (std::size_t i = 0; i < grid.theta_axis.size(); ++i) {
    const double th = grid.theta_axis[i];
    if (std::abs(th) < 5.0) continue;
    std::size_t arg = 0;
    for (std::size_t j = 1; j < nt; ++j) {
      if (grid.at(i, j) > grid.at(i, arg)) arg = j;
    }
    if (!(grid.at(i, arg) >= level)) continue;
    if (grid.tau_axis[arg] > 0.0) out.crest.emplace_back(std::abs(th), grid.tau_axis[arg]);
  }
  if (out.crest.size() < 2) {
    throw NoRidge("superlevel set does not reach |theta0| >= 5 along a tau > 0 crest");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [a, t] : out.crest) {
    const double x = std::log(a);
    const double y = std::log(t);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(out.crest.size());
  const double denom = n * sxx - sx * sx;
  if (!(denom > 0.0)) throw NoRidge("ridge crest spans a single |theta0|");
  out.slope = (n * sxy - sx * sy) / denom;
  out.intercept = (sy - out.slope * sx) / n;
  return out;
}

double chi2_threshold(double level, double df) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidInput("level must lie in (0, 1)");
  return boost::math::quantile(boost::math::chi_squared_distribution<double>(df), level);
}

std::vector<double> default_probe_n() { return {1e1, 1e2, 1e3, 1e4}; }

RegionProbeReport diameter_probe(std::span<const StudyObservation> data, double loglik_hat,
                                 const SelectionMode& mode, double level,
                                 std::span<const double> n_values) {
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    if (!(n_values[i] > 0.0) || (i > 0 && !(n_values[i] > n_values[i - 1]))) {
      throw InvalidInput("probe n values must be positive and increasing");
    }
  }
  RegionProbeReport report;
  report.level = level;
  report.chi2_threshold = chi2_threshold(level, 2.0);
  report.loglik_hat = loglik_hat;
  const LikelihoodSurface surface(data, mode);
  auto accepts = [&](double ll) {
    return ll != kLogZero && 2.0 * (loglik_hat - ll) <= report.chi2_threshold;
  };

  for (double n : n_values) {
    const double th = -n;
    const double t = std::sqrt(n);
    const double ll = surface(th, t);
    report.probed_ray.push_back({n, th, t, ll, accepts(ll)});
  }

  if (surface.profiled()) {
    auto lim = profile_limit_loglik(data, mode_cuts(mode));
    report.limit_loglik = lim.value;
    report.vanished_studies = std::move(lim.vanished_studies);
  } else {
    const auto& sel = std::get<FixedSelection>(mode).selection;
    if (sel.bands() >= 2) {
      auto lim = limit_loglik(data, sel);
      report.vanished_studies = std::move(lim.vanished_studies);
      // A positive weight on the last band keeps mass escaping to -inf.
      report.limit_loglik = sel.log_weights().back() == kLogZero ? lim.value : kLogZero;
    }
  }

  for (const auto& p : report.probed_ray) {
    if (p.accepted) {
      report.max_accepted_n = p.n;
      report.diameter_lower_bound = std::hypot(p.theta0, p.tau);
    }
  }
  report.unbounded = !report.probed_ray.empty() && report.probed_ray.back().accepted &&
                     accepts(report.limit_loglik);
  return report;
}

ConfidenceRegion lr_confidence_region(std::span<const StudyObservation> data, double level,
                                      const SelectionMode& mode, const RegionGridSpec& spec,
                                      std::span<const double> n_values) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidInput("level must lie in (0, 1)");
  ConfidenceRegion region{loglik_grid(data, spec.theta, spec.tau, mode), {},
                          fit_mle_best_effort(data, mode), {}};
  // The supremum may sit out on the ray rather than at the fitted point.
  const auto scout = diameter_probe(data, region.fit.loglik_hat, mode, level, n_values);
  double hat = std::max(region.fit.loglik_hat, region.grid.max());
  for (const auto& p : scout.probed_ray) hat = std::max(hat, p.loglik);
  hat = std::max(hat, scout.limit_loglik);

  region.probe = diameter_probe(data, hat, mode, level, n_values);
  const double thr = region.probe.chi2_threshold;
  region.accepted.resize(region.grid.values.size());
  for (std::size_t c = 0; c < region.grid.values.size(); ++c) {
    const double ll = region.grid.values[c];
    region.accepted[c] = ll != kLogZero && 2.0 * (hat - ll) <= thr;
  }
  return region;
}

double profile_loglik_theta(const LikelihoodSurface& surface, double theta0, double tau_start) {
  NelderMeadOptions opt;
  opt.initial_step = 1.0;
  opt.x_tolerance = 1e-7;
  opt.f_tolerance = 1e-11;
  const auto nm = nelder_mead(
      [&](std::span<const double> v) { return -surface(theta0, std::exp(v[0])); },
      {std::log(std::max(tau_start, 1e-6))}, opt);
  return std::max(-nm.value, surface(theta0, 0.0));
}

bool ProfileInterval::finite() const { return std::isfinite(lo) && std::isfinite(hi); }

ProfileInterval profile_interval_theta(std::span<const StudyObservation> data,
                                       const SelectionMode& mode, const FitResult& fit,
                                       double level, double search_radius) {
  const LikelihoodSurface surface(data, mode);
  const double thr = chi2_threshold(level, 1.0);
  const double tau_start = std::max(fit.tau, 0.05);
  const double hat = std::max(fit.loglik_hat, profile_loglik_theta(surface, fit.theta0, tau_start));
  auto excess = [&](double th) {
    return 2.0 * (hat - profile_loglik_theta(surface, th, tau_start)) - thr;
  };

  auto endpoint = [&](double direction) {
    double step = 0.05;
    double inside = fit.theta0;
    double outside = fit.theta0 + direction * step;
    while (excess(outside) < 0.0) {
      inside = outside;
      step *= 2.0;
      if (step > search_radius) return direction * kInf;
      outside = fit.theta0 + direction * step;
    }
    boost::math::tools::eps_tolerance<double> tol(40);
    std::uintmax_t iters = 100;
    const auto [a, b] = boost::math::tools::toms748_solve(
        excess, std::min(inside, outside), std::max(inside, outside), tol, iters);
    return 0.5 * (a + b);
  };
  return {endpoint(-1.0), endpoint(1.0)};
}

double theta_standard_error(std::span<const StudyObservation> data, const SelectionMode& mode,
                            const FitResult& fit) {
  const LikelihoodSurface surface(data, mode);
  const double tau_start = std::max(fit.tau, 0.05);
  const double h = 1e-3 * std::max(1.0, std::abs(fit.theta0));
  const double mid = profile_loglik_theta(surface, fit.theta0, tau_start);
  const double up = profile_loglik_theta(surface, fit.theta0 + h, tau_start);
  const double down = profile_loglik_theta(surface, fit.theta0 - h, tau_start);
  const double curvature = -(up - 2.0 * mid + down) / (h * h);
  return curvature > 0.0 ? 1.0 / std::sqrt(curvature) : kInf;
}

}  // namespace selectlik
