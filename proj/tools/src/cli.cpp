#include "selectlik_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "selectlik/asymptotics.hpp"
#include "selectlik/bayes.hpp"
#include "selectlik/errors.hpp"
#include "selectlik/estimation.hpp"
#include "selectlik/sampling.hpp"

namespace selectlik::cli {

namespace {

using nlohmann::json;

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json header(const char* command) { return {{"schema_version", kSchemaVersion}, {"command", command}}; }

// Selection flags shared by fit, contour, probe and bayes.
struct SelectionFlags {
  std::vector<double> rho;
  std::vector<double> alpha;
  bool profiled = false;

  void attach(CLI::App& app, bool allow_profiled = true) {
    app.add_option("--rho,--rho-fixed", rho, "Publication weights per band, comma separated (default 1)")
        ->delimiter(',');
    app.add_option("--alpha", alpha, "p-value cuts 0,...,1, comma separated (default 0,1)")->delimiter(',');
    if (allow_profiled)
      app.add_flag("--profiled", profiled, "Treat the weights as unknown and profile them out");
  }

  SelectionMode mode() const {
    if (profiled) {
      if (!rho.empty()) throw InputError("--rho and --profiled are mutually exclusive");
      if (alpha.empty()) throw InputError("--profiled needs --alpha");
      // validate the cuts through SelectionSteps with unit weights
      SelectionSteps(alpha, std::vector<double>(alpha.size() - 1, 1.0));
      return ProfiledSelection{alpha};
    }
    return FixedSelection{LogSelection(steps())};
  }

  SelectionSteps steps() const {
    const auto r = rho.empty() ? std::vector<double>{1.0} : rho;
    const auto a = alpha.empty() ? std::vector<double>{0.0, 1.0} : alpha;
    return SelectionSteps(a, r);
  }
};

json selection_json(const LogSelection& sel) {
  json w = json::array(), lw = json::array();
  for (double v : sel.weights()) w.push_back(v);
  for (double v : sel.log_weights()) lw.push_back(num(v));
  return {{"alpha", std::vector<double>(sel.cuts().begin(), sel.cuts().end())}, {"rho", w}, {"log_rho", lw}};
}

json fit_json(const FitResult& f) {
  return {{"params_hat", {{"theta0", f.theta0}, {"tau", f.tau}, {"selection", selection_json(f.selection)}}},
          {"loglik_hat", num(f.loglik_hat)},
          {"converged", f.converged},
          {"n_restarts_used", f.n_restarts_used},
          {"gradient_norm_at_opt", num(f.gradient_norm_at_opt)}};
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-")
    out << content;
  else
    write_atomic(path, content);
}

void warn_vanished(const std::vector<std::size_t>& idx, std::ostream& err) {
  if (idx.empty()) return;
  err << "warning: " << idx.size() << " stud" << (idx.size() == 1 ? "y" : "ies")
      << " in a band whose limiting weight is zero (rows";
  for (auto i : idx) err << ' ' << i + 1;
  err << "); the likelihood along the witness ray diverges\n";
}

AxisSpec axis(const std::vector<double>& range, std::size_t points, const char* flag) {
  if (range.size() != 2 || !(range[0] < range[1])) throw InputError(std::string(flag) + " needs lo,hi with lo < hi");
  if (points < 2) throw InputError("grids need at least 2 points per axis");
  return {range[0], range[1], points};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Step selection model for meta-analysis under publication bias", "selectlik"};
  app.require_subcommand(1);
  std::function<int()> action;

  // simulate ---------------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "Draw a published corpus by rejection sampling");
  double sim_theta0 = 0.0, sim_tau = 0.0, sim_sigma = 1.0;
  std::size_t sim_count = 0, sim_budget = 1'000'000;
  std::uint64_t sim_seed = 0;
  std::string sim_sigmas, sim_out;
  SelectionFlags sim_sel;
  sim->add_option("--theta0", sim_theta0, "Mean effect")->required();
  sim->add_option("--tau", sim_tau, "Heterogeneity sd")->required();
  sim_sel.attach(*sim, false);
  auto* sigmas_opt = sim->add_option("--sigmas", sim_sigmas, "File of standard errors, one per line");
  auto* count_opt = sim->add_option("--count", sim_count, "Number of studies (with --sigma)");
  sim->add_option("--sigma", sim_sigma, "Common standard error for --count")->needs(count_opt);
  sigmas_opt->excludes(count_opt);
  sim->add_option("--seed", sim_seed, "Random seed");
  sim->add_option("--max-attempts", sim_budget, "Rejection budget per study");
  sim->add_option("--out", sim_out, "Studies CSV to write")->required();
  sim->callback([&] {
    action = [&] {
      if (sim_sigmas.empty() && sim_count == 0) throw InputError("give --sigmas FILE or --count N");
      const auto sigmas = sim_sigmas.empty() ? std::vector<double>(sim_count, sim_sigma) : read_sigmas(sim_sigmas);
      const SimulationConfig cfg{ModelParams(sim_theta0, sim_tau, sim_sel.steps()), sigmas, sim_seed, sim_budget};
      const auto res = simulate_hedges(cfg);
      write_atomic(sim_out, format_studies(res.studies));
      auto j = header("simulate");
      j["studies"] = res.studies.size();
      j["total_attempts"] = res.total_attempts();
      j["acceptance_rate"] = res.acceptance_rate();
      j["seed"] = sim_seed;
      j["out"] = sim_out;
      out << j.dump(2) << '\n';
      return kOk;
    };
  });

  // fit ---------------------------------------------------------------------
  auto* fit = app.add_subcommand("fit", "Maximum likelihood estimate");
  std::string fit_in, fit_out;
  SelectionFlags fit_sel;
  std::size_t fit_starts = 8, fit_evals = 20000;
  fit->add_option("--in", fit_in, "Studies CSV")->required();
  fit_sel.attach(*fit);
  fit->add_option("--starts", fit_starts, "Simplex restarts");
  fit->add_option("--max-evaluations", fit_evals, "Objective evaluations per restart");
  fit->add_option("--out", fit_out, "JSON output (default stdout)");
  fit->callback([&] {
    action = [&] {
      const auto data = read_studies(fit_in);
      const auto mode = fit_sel.mode();
      FitOptions opts;
      opts.starts = fit_starts;
      opts.optimizer.max_evaluations = fit_evals;
      FitResult res;
      int code = kOk;
      try {
        res = fit_mle(data, mode, opts);
      } catch (const NonConvergence& e) {
        res = e.best();
        code = kNonConvergence;
        err << "warning: " << e.what() << "; reporting the best point found\n";
      }
      auto j = header("fit");
      j.update(fit_json(res));
      j["mode"] = fit_sel.profiled ? "profiled" : "fixed";
      j["n_studies"] = data.size();
      emit(fit_out, j.dump(2) + "\n", out);
      return code;
    };
  });

  // contour -----------------------------------------------------------------
  auto* contour = app.add_subcommand("contour", "Log-likelihood on a (theta0, tau) grid");
  std::string con_in, con_out;
  SelectionFlags con_sel;
  std::vector<double> con_theta{-60.0, 5.0}, con_tau{0.0, 10.0};
  std::size_t con_points = 100;
  double con_offset = 2.0;
  contour->add_option("--in", con_in, "Studies CSV")->required();
  con_sel.attach(*contour);
  contour->add_option("--theta", con_theta, "theta0 range lo,hi")->delimiter(',')->expected(2);
  contour->add_option("--tau", con_tau, "tau range lo,hi")->delimiter(',')->expected(2);
  contour->add_option("--points", con_points, "Grid points per axis");
  contour->add_option("--ridge-offset", con_offset, "Superlevel offset below loglik_hat for the ridge fit");
  contour->add_option("--out", con_out, "Grid CSV theta,tau,loglik")->required();
  contour->callback([&] {
    action = [&] {
      const auto data = read_studies(con_in);
      const auto mode = con_sel.mode();
      const auto grid =
          loglik_grid(data, axis(con_theta, con_points, "--theta"), axis(con_tau, con_points, "--tau"), mode);
      std::string csv = "theta,tau,loglik\n";
      for (std::size_t i = 0; i < grid.theta_axis.size(); ++i) {
        for (std::size_t j = 0; j < grid.tau_axis.size(); ++j) {
          const double v = grid.at(i, j);
          csv += format_double(grid.theta_axis[i]) + "," + format_double(grid.tau_axis[j]) + "," +
                 (std::isfinite(v) ? format_double(v) : std::string("-inf")) + "\n";
        }
      }
      write_atomic(con_out, csv);
      const auto f = fit_mle_best_effort(data, mode);
      auto j = header("contour");
      j["grid_max"] = num(grid.max());
      j["loglik_hat"] = num(f.loglik_hat);
      try {
        const auto r = ridge_slope(grid, con_offset, f.loglik_hat);
        j["ridge"] = {{"slope", r.slope}, {"intercept", r.intercept}, {"columns", r.crest.size()}};
      } catch (const NoRidge& e) {
        j["ridge"] = nullptr;
        j["ridge_error"] = e.what();
      }
      j["out"] = con_out;
      out << j.dump(2) << '\n';
      return kOk;
    };
  });

  // probe -------------------------------------------------------------------
  auto* probe = app.add_subcommand("probe", "Likelihood-ratio region and witness-ray diameter probe");
  std::string pr_in, pr_out;
  SelectionFlags pr_sel;
  double pr_level = 0.95;
  std::vector<double> pr_n = default_probe_n();
  probe->add_option("--in", pr_in, "Studies CSV")->required();
  pr_sel.attach(*probe);
  probe->add_option("--level", pr_level, "Confidence level");
  probe->add_option("--n", pr_n, "Ray positions n (theta0 = -n, tau = sqrt n)")->delimiter(',');
  probe->add_option("--out", pr_out, "JSON output (default stdout)");
  probe->callback([&] {
    action = [&] {
      const auto data = read_studies(pr_in);
      const auto mode = pr_sel.mode();
      if (!(pr_level > 0.0 && pr_level < 1.0)) throw InputError("--level must lie in (0, 1)");
      for (double n : pr_n)
        if (!(n > 0.0)) throw InputError("--n values must be positive");
      const auto region = lr_confidence_region(data, pr_level, mode, {}, pr_n);
      const auto& rep = region.probe;
      warn_vanished(rep.vanished_studies, err);
      json ray = json::array();
      for (const auto& p : rep.probed_ray)
        ray.push_back({{"n", p.n}, {"theta0", p.theta0}, {"tau", p.tau}, {"loglik", num(p.loglik)}, {"accepted", p.accepted}});
      auto j = header("probe");
      j["mode"] = pr_sel.profiled ? "profiled" : "fixed";
      j["level"] = rep.level;
      j["chi2_threshold"] = rep.chi2_threshold;
      j["loglik_hat"] = num(rep.loglik_hat);
      j["fit"] = fit_json(region.fit);
      j["probed_ray"] = ray;
      j["max_accepted_n"] = rep.max_accepted_n ? json(*rep.max_accepted_n) : json(nullptr);
      j["unbounded"] = rep.unbounded;
      j["diameter_lower_bound"] = rep.diameter_lower_bound;
      j["limit_loglik"] = num(rep.limit_loglik);
      if (!rep.probed_ray.empty() && std::isfinite(rep.limit_loglik))
        j["limit_gap_at_largest_n"] = num(std::abs(rep.probed_ray.back().loglik - rep.limit_loglik));
      j["vanished_studies"] = rep.vanished_studies;
      std::size_t accepted = 0;
      for (auto a : region.accepted) accepted += a;
      j["grid_cells_accepted"] = accepted;
      j["grid_cells"] = region.accepted.size();
      emit(pr_out, j.dump(2) + "\n", out);
      return kOk;
    };
  });

  // witness -----------------------------------------------------------------
  auto* wit = app.add_subcommand("witness", "Sup-distance of the witness density from its exponential limit");
  double w_a = 1.96, w_b = std::numeric_limits<double>::infinity(), w_c = 0.0;
  std::vector<double> w_n{10.0, 100.0, 1000.0, 10000.0};
  std::string w_out;
  wit->add_option("--a", w_a, "Lower band edge");
  wit->add_option("--b", w_b, "Upper band edge (default inf)");
  wit->add_option("--c", w_c, "Variance offset: tau^2 = n + c");
  wit->add_option("--n", w_n, "Values of n")->delimiter(',');
  wit->add_option("--out", w_out, "CSV n,sup_error (default stdout)");
  wit->callback([&] {
    action = [&] {
      std::string csv = "n,sup_error\n";
      for (const auto& r : witness_convergence(w_a, w_b, w_c, w_n))
        csv += format_double(r.n) + "," + format_double(r.sup_error) + "\n";
      emit(w_out, csv, out);
      return kOk;
    };
  });

  // bayes -------------------------------------------------------------------
  auto* bay = app.add_subcommand("bayes", "Grid posterior with a normal prior on theta0");
  std::string b_in, b_out, b_interval;
  SelectionFlags b_sel;
  std::vector<double> b_theta{-5.0, 5.0}, b_tau{0.0, 5.0};
  std::size_t b_points = 400;
  double b_mass = 0.95;
  PriorSpec prior;
  bay->add_option("--in", b_in, "Studies CSV")->required();
  b_sel.attach(*bay, false);
  bay->add_option("--theta", b_theta, "theta0 range lo,hi")->delimiter(',')->expected(2);
  bay->add_option("--tau", b_tau, "tau range lo,hi")->delimiter(',')->expected(2);
  bay->add_option("--points", b_points, "Grid points per axis");
  bay->add_option("--mass", b_mass, "Credible mass");
  bay->add_option("--prior-theta-mean", prior.theta_mean, "Prior mean of theta0");
  bay->add_option("--prior-theta-sd", prior.theta_sd, "Prior sd of theta0");
  bay->add_option("--prior-tau-scale", prior.tau_scale, "Half-normal scale of tau");
  bay->add_option("--out", b_out, "Posterior CSV theta,tau,log_post")->required();
  bay->add_option("--interval-out", b_interval, "Interval JSON (default stdout)");
  bay->callback([&] {
    action = [&] {
      const auto data = read_studies(b_in);
      const LogSelection sel(b_sel.steps());
      const PosteriorGridSpec spec{axis(b_theta, b_points, "--theta"), axis(b_tau, b_points, "--tau"), b_mass};
      const auto g = grid_posterior(data, sel, spec, prior);
      std::string csv = "theta,tau,log_post\n";
      for (std::size_t i = 0; i < g.theta_axis.size(); ++i) {
        for (std::size_t j = 0; j < g.tau_axis.size(); ++j) {
          const double v = g.at(i, j) - g.normalizer;
          csv += format_double(g.theta_axis[i]) + "," + format_double(g.tau_axis[j]) + "," +
                 (std::isfinite(v) ? format_double(v) : std::string("-inf")) + "\n";
        }
      }
      write_atomic(b_out, csv);
      auto j = header("bayes");
      j["mass"] = g.mass;
      j["theta0_interval"] = {num(g.theta_interval.lo), num(g.theta_interval.hi)};
      j["tau_interval"] = {num(g.tau_interval.lo), num(g.tau_interval.hi)};
      j["mode"] = {{"theta0", g.mode_theta}, {"tau", g.mode_tau}, {"log_post", num(g.mode_log_post)}};
      j["prior"] = {{"theta_mean", prior.theta_mean}, {"theta_sd", prior.theta_sd}, {"tau_scale", prior.tau_scale}};
      j["selection"] = selection_json(sel);
      j["out"] = b_out;
      emit(b_interval, j.dump(2) + "\n", out);
      return kOk;
    };
  });

  std::vector<std::string> rev(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rev.begin(), rev.end());
  try {
    app.parse(rev);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    return action();
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const GridTooSmall& e) {
    err << "error: " << e.what() << "; widen the grid\n";
    return kInputError;
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const Underflow& e) {
    err << "error: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace selectlik::cli
