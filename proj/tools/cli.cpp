#include "cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "ggsep/divergence.hpp"
#include "ggsep/projection.hpp"
#include "ggsep/selection.hpp"
#include "ggsep/serialization.hpp"
#include "ggsep/simulation.hpp"

namespace ggsep::cli {

namespace {

using io::Json;

void emit(const Json& j, const std::string& out_path, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
  } else {
    io::write_text_file(out_path, text);
  }
}

void add_fit_flags(CLI::App* cmd, FitOptions& opts) {
  cmd->add_option("--max-iter", opts.max_iterations, "Maximum optimizer iterations")
      ->capture_default_str();
  cmd->add_option("--tol", opts.gradient_tolerance, "Projected-gradient norm tolerance")
      ->capture_default_str();
  cmd->add_option("--initial-step", opts.initial_step, "First trial step length")->capture_default_str();
  cmd->add_option("--backtracking-ratio", opts.backtracking_ratio, "Step shrink factor in (0,1)")
      ->capture_default_str();
  cmd->add_option("--armijo", opts.armijo_constant, "Armijo sufficient-decrease constant")
      ->capture_default_str();
}

int exit_code_for(const Error& e) {
  switch (e.category()) {
    case ErrorCategory::Input: return kInputError;
    case ErrorCategory::MathDomain: return kMathError;
    case ErrorCategory::Convergence: return kNotConverged;
  }
  return kMathError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"KL separation between Gaussian graphical models with mismatched edge sets"};
  app.name("ggsep");
  app.require_subcommand(1);

  std::string out_path;
  double zero_tol = kDefaultZeroTol;
  FitOptions fit_opts;
  double gamma = kNoBall;

  // kl
  std::string theta1_path, theta2_path;
  auto* kl_cmd = app.add_subcommand("kl", "KL(q1 || q2) between two precision matrices, in nats");
  kl_cmd->add_option("theta1", theta1_path, "Precision matrix JSON of q1")->required();
  kl_cmd->add_option("theta2", theta2_path, "Precision matrix JSON of q2")->required();

  // bounds
  std::string theta_path;
  std::optional<double> alpha, h;
  auto* bounds_cmd = app.add_subcommand("bounds", "Separation constant and one-edge KL lower bound");
  bounds_cmd->set_help_flag("--help", "Print this help message and exit");  // frees -h for --h
  bounds_cmd->add_option("theta", theta_path, "Precision matrix JSON")->required();
  bounds_cmd->add_option("--alpha", alpha, "Minimum edge magnitude of the Omega_inf class");
  bounds_cmd->add_option("--h", h, "Maximum diagonal of the Omega_inf class");
  bounds_cmd->add_option("--zero-tol", zero_tol, "Entries at or below this magnitude are zero")
      ->capture_default_str();

  // verify
  std::string star_path;
  auto* verify_cmd = app.add_subcommand("verify", "Compare KL(q_theta* || q_theta) with the one-edge bound");
  verify_cmd->add_option("theta_star", star_path, "True precision matrix JSON")->required();
  verify_cmd->add_option("theta", theta_path, "Alternative precision matrix JSON")->required();
  verify_cmd->add_option("--zero-tol", zero_tol, "Entries at or below this magnitude are zero")
      ->capture_default_str();

  // project
  std::vector<int> edge;
  int star_centre = -1;
  std::vector<int> star_neighbours;
  auto* project_cmd = app.add_subcommand("project", "Information projection removing an edge or a star");
  project_cmd->add_option("theta", theta_path, "Precision matrix JSON")->required();
  auto* edge_opt = project_cmd->add_option("--edge", edge, "Edge to remove: i j")->expected(2);
  auto* star_opt = project_cmd->add_option("--star", star_centre, "Centre vertex of the star to remove");
  auto* nbr_opt = project_cmd->add_option("--neighbors", star_neighbours, "Star neighbours, comma separated")
                      ->delimiter(',');
  star_opt->needs(nbr_opt);
  nbr_opt->needs(star_opt);
  edge_opt->excludes(star_opt);
  project_cmd->add_option("--out", out_path, "Output path (default: stdout)");

  // fit
  std::string sigma_path, graph_path;
  auto* fit_cmd = app.add_subcommand("fit", "Support-constrained Gaussian MLE inside a Frobenius ball");
  fit_cmd->add_option("sigma", sigma_path, "Covariance matrix JSON")->required();
  fit_cmd->add_option("graph", graph_path, "Edge set JSON")->required();
  fit_cmd->add_option("--gamma", gamma, "Frobenius-norm bound (inf disables)")->capture_default_str();
  add_fit_flags(fit_cmd, fit_opts);
  fit_cmd->add_option("--out", out_path, "Output path (default: stdout)");

  // select
  std::string candidates_path;
  auto* select_cmd = app.add_subcommand("select", "Minimum-score graph among candidates");
  select_cmd->add_option("sigma", sigma_path, "Covariance matrix JSON")->required();
  select_cmd->add_option("candidates", candidates_path, "JSON list of edge sets")->required();
  select_cmd->add_option("--gamma", gamma, "Frobenius-norm bound (inf disables)")->capture_default_str();
  add_fit_flags(select_cmd, fit_opts);
  select_cmd->add_option("--out", out_path, "Output path (default: stdout)");

  // experiment
  std::string kind, config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a verification experiment; writes <out>.json and <out>.csv");
  exp_cmd->add_option("kind", kind, "counterexample | lower-bound | selection")
      ->required()
      ->check(CLI::IsMember({"counterexample", "lower-bound", "selection"}));
  exp_cmd->add_option("config", config_path, "Experiment config JSON")->required();
  exp_cmd->add_option("--out", out_path, "Output path prefix")->required();
  exp_cmd->add_option("--seed", seed, "Overrides base_seed from the config");
  exp_cmd->add_option("--threads", threads, "Worker threads (results do not depend on it)");

  // counterexample
  int d = 1;
  auto* ce_cmd = app.add_subcommand("counterexample", "Write the star-family precision matrix of order d+1");
  ce_cmd->add_option("--d", d, "Number of leading variables")->required();
  ce_cmd->add_option("--out", out_path, "Output path (default: stdout)");

  // sample
  int n = 0;
  std::uint64_t sample_seed = 0;
  auto* sample_cmd = app.add_subcommand("sample", "Empirical covariance of n seeded draws from N(0, theta^-1)");
  sample_cmd->add_option("theta", theta_path, "Precision matrix JSON")->required();
  sample_cmd->add_option("--n", n, "Sample size")->required();
  sample_cmd->add_option("--seed", sample_seed, "Generator seed")->capture_default_str();
  sample_cmd->add_option("--out", out_path, "Output path (default: stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "ggsep: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (*kl_cmd) {
      const PrecisionMatrix t1 = io::precision_from_json(io::read_json_file(theta1_path));
      const PrecisionMatrix t2 = io::precision_from_json(io::read_json_file(theta2_path));
      emit(Json{{"kl", kl_gaussian(t1, t2)}}, "", out);
    } else if (*bounds_cmd) {
      const PrecisionMatrix t = io::precision_from_json(io::read_json_file(theta_path));
      Json j;
      j["c_star"] = c_theta_star(t, zero_tol);
      j["bound"] = one_edge_lower_bound(t, zero_tol);
      if (alpha.has_value() != h.has_value()) {
        throw Error(ErrorCode::InvalidParameters, "--alpha and --h must be given together");
      }
      if (alpha) {
        j["omega_inf_bound"] = omega_inf_lower_bound(*alpha, *h);
        j["in_omega_inf"] = class_membership(t, MatrixClassSpec::omega_inf(*alpha, *h), zero_tol);
      }
      emit(j, "", out);
    } else if (*verify_cmd) {
      const PrecisionMatrix ts = io::precision_from_json(io::read_json_file(star_path));
      const PrecisionMatrix t = io::precision_from_json(io::read_json_file(theta_path));
      emit(io::to_json(verify_separation(ts, t, zero_tol)), "", out);
    } else if (*project_cmd) {
      const PrecisionMatrix t = io::precision_from_json(io::read_json_file(theta_path));
      if (!*edge_opt && !*star_opt) {
        throw Error(ErrorCode::InvalidParameters, "project needs --edge or --star/--neighbors");
      }
      const PrecisionMatrix result = *edge_opt ? project_remove_edge(t, Edge(edge[0], edge[1]))
                                               : project_remove_star(t, star_centre, star_neighbours);
      emit(io::matrix_to_json(result.matrix()), out_path, out);
    } else if (*fit_cmd) {
      const CovarianceMatrix s = io::covariance_from_json(io::read_json_file(sigma_path));
      const EdgeSet g = io::edge_set_from_json(io::read_json_file(graph_path));
      const FitResult r = fit_graph_mle(s, g, gamma, fit_opts);
      emit(io::to_json(r), out_path, out);
      if (!r.converged) {
        err << "ggsep: fit did not converge (projected gradient norm " << r.projected_gradient_norm << ")\n";
        return kNotConverged;
      }
    } else if (*select_cmd) {
      const CovarianceMatrix s = io::covariance_from_json(io::read_json_file(sigma_path));
      const CandidateCollection c = io::candidates_from_json(io::read_json_file(candidates_path));
      emit(io::to_json(select_graph(c, s, gamma, fit_opts)), out_path, out);
    } else if (*exp_cmd) {
      ExperimentConfig cfg = io::experiment_config_from_json(io::read_json_file(config_path));
      if (seed) cfg.base_seed = *seed;
      if (threads) cfg.threads = *threads;
      ExperimentReport report;
      if (kind == "counterexample") {
        report = run_counterexample_experiment(cfg.d_values, cfg.kl_tolerance);
      } else if (kind == "lower-bound") {
        report = run_lower_bound_experiment(cfg);
      } else {
        report = run_selection_experiment(cfg);
      }
      Json j = io::to_json(report);
      j["config"] = io::to_json(cfg);
      io::write_text_file(out_path + ".json", j.dump(2) + "\n");
      std::ostringstream csv;
      io::write_grid_csv(csv, report);
      io::write_text_file(out_path + ".csv", csv.str());
      err << "ggsep: " << report.records.size() << " trials, success rate " << report.success_rate << "\n";
    } else if (*ce_cmd) {
      emit(io::matrix_to_json(counterexample_precision(d).matrix()), out_path, out);
    } else if (*sample_cmd) {
      const PrecisionMatrix t = io::precision_from_json(io::read_json_file(theta_path));
      emit(io::matrix_to_json(empirical_covariance(sample(t, n, sample_seed)).matrix()), out_path, out);
    }
  } catch (const Error& e) {
    err << "ggsep: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "ggsep: " << e.what() << "\n";
    return kInputError;
  }
  return kSuccess;
}

}  // namespace ggsep::cli
