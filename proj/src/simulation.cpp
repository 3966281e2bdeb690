#include "ggsep/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <thread>

#include "ggsep/divergence.hpp"
#include "ggsep/selection.hpp"

namespace ggsep {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Runs body(k) for k in [0, count). Each task writes only its own slot, so
// the outcome is independent of scheduling.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count && !failed; k = next++) {
        try {
          body(k);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void finalize_totals(ExperimentReport& report) {
  int successes = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  std::vector<double> kls;
  for (const TrialRecord& r : report.records) {
    successes += r.success ? 1 : 0;
    if (auto it = r.values.find("slack"); it != r.values.end()) min_slack = std::min(min_slack, it->second);
    if (auto it = r.values.find("kl"); it != r.values.end()) kls.push_back(it->second);
  }
  report.success_rate =
      report.records.empty() ? 0.0 : static_cast<double>(successes) / static_cast<double>(report.records.size());
  report.min_slack = std::isfinite(min_slack) ? min_slack : 0.0;
  report.mean_kl = mean_of(kls);
}

GridSummary summarize(const std::vector<TrialRecord>& records, std::size_t grid_index, int n, int p, int s) {
  GridSummary g;
  g.n = n;
  g.p = p;
  g.s = s;
  int successes = 0;
  std::vector<double> gaps, kls;
  double min_slack = std::numeric_limits<double>::infinity();
  for (const TrialRecord& r : records) {
    if (r.grid_index != grid_index) continue;
    ++g.trials;
    successes += r.success ? 1 : 0;
    if (auto it = r.values.find("gap"); it != r.values.end()) gaps.push_back(it->second);
    if (auto it = r.values.find("kl"); it != r.values.end()) kls.push_back(it->second);
    if (auto it = r.values.find("slack"); it != r.values.end()) min_slack = std::min(min_slack, it->second);
  }
  g.success_rate = g.trials ? static_cast<double>(successes) / g.trials : 0.0;
  std::tie(g.ci_low, g.ci_high) = wilson_interval(successes, g.trials);
  g.mean_gap = mean_of(gaps);
  g.mean_kl = mean_of(kls);
  g.min_slack = std::isfinite(min_slack) ? min_slack : 0.0;
  return g;
}

}  // namespace

SampleMatrix::SampleMatrix(Matrix rows) : rows_(std::move(rows)) {
  if (rows_.rows() < 1 || rows_.cols() < 1) {
    throw Error(ErrorCode::InvalidParameters, "sample matrix must be nonempty");
  }
  if (!rows_.allFinite()) throw Error(ErrorCode::InvalidParameters, "sample matrix has non-finite entries");
}

SampleMatrix sample(const PrecisionMatrix& theta, int n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::InvalidParameters, "sample size must be positive");
  const SpdFactorization fac = factorize(theta);
  const Eigen::Index p = theta.order();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  // column k of z is the k-th standard normal draw vector
  Matrix z(p, n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < p; ++i) z(i, k) = normal(rng);
  const Matrix x = fac.factor().triangularView<Eigen::Lower>().transpose().solve(z);
  return SampleMatrix(x.transpose());
}

CovarianceMatrix empirical_covariance(const SampleMatrix& x) {
  const Matrix& r = x.rows();
  Matrix s = (r.transpose() * r) / static_cast<double>(x.n());
  return CovarianceMatrix(s);
}

CovarianceMatrix corrected_covariance(const CovarianceMatrix& sigma_hat, const Vector& true_diag) {
  if (true_diag.size() != sigma_hat.order()) {
    throw Error(ErrorCode::InvalidDiagonal, "diagonal length does not match covariance order");
  }
  if (!true_diag.allFinite() || !(true_diag.minCoeff() > 0.0)) {
    throw Error(ErrorCode::InvalidDiagonal, "diagonal entries must be positive");
  }
  Matrix m = sigma_hat.matrix();
  m.diagonal() = true_diag;
  return CovarianceMatrix(m);
}

PrecisionMatrix counterexample_precision(int d) {
  if (d < 1) throw Error(ErrorCode::InvalidParameters, "counterexample needs d >= 1");
  const int p = d + 1;
  Matrix m = Matrix::Ones(p, p);
  m.diagonal().setConstant(2.0);
  m.row(d).setConstant(-1.0);
  m.col(d).setConstant(-1.0);
  m(d, d) = 1.0;
  return PrecisionMatrix(m);
}

PrecisionMatrix chain_precision(int p, double diagonal, double off_diagonal) {
  if (p < 2) throw Error(ErrorCode::InvalidParameters, "chain needs p >= 2");
  EdgeSet g(p);
  for (int k = 0; k + 1 < p; ++k) g.insert(Edge(k, k + 1));
  return precision_from_edges(g, diagonal, off_diagonal);
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t grid_index, std::size_t trial) {
  std::uint64_t h = splitmix64(base_seed);
  h = splitmix64(h ^ (static_cast<std::uint64_t>(grid_index) * 0xD1B54A32D192ED03ULL));
  return splitmix64(h ^ static_cast<std::uint64_t>(trial));
}

PrecisionMatrix random_sparse_precision(int p, std::mt19937_64& rng, const RandomPrecisionOptions& opts) {
  if (p < 2) throw Error(ErrorCode::InvalidParameters, "random precision needs p >= 2");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix m = Matrix::Zero(p, p);
  bool any = false;
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      if (unit(rng) < opts.edge_probability) {
        const double mag = opts.min_magnitude + (opts.max_magnitude - opts.min_magnitude) * unit(rng);
        const double v = unit(rng) < 0.5 ? -mag : mag;
        m(i, j) = v;
        m(j, i) = v;
        any = true;
      }
    }
  }
  if (!any) {
    std::uniform_int_distribution<int> pick(0, p - 1);
    const int i = pick(rng);
    int j = pick(rng);
    if (j == i) j = (i + 1) % p;
    const double mag = opts.min_magnitude + (opts.max_magnitude - opts.min_magnitude) * unit(rng);
    m(i, j) = mag;
    m(j, i) = mag;
  }
  for (int i = 0; i < p; ++i) {
    const double margin = opts.min_margin + (opts.max_margin - opts.min_margin) * unit(rng);
    m(i, i) = m.row(i).cwiseAbs().sum() + margin;
  }
  return PrecisionMatrix(m);
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw Error(ErrorCode::InvalidParameters, "trials must be >= 1");
  if (dimensions.empty() || sample_sizes.empty() || d_values.empty()) {
    throw Error(ErrorCode::InvalidParameters, "experiment grids must be nonempty");
  }
  for (int p : dimensions)
    if (p < 2) throw Error(ErrorCode::InvalidParameters, "dimensions must be >= 2");
  for (int n : sample_sizes)
    if (n < 1) throw Error(ErrorCode::InvalidParameters, "sample sizes must be >= 1");
  for (int d : d_values)
    if (d < 1) throw Error(ErrorCode::InvalidParameters, "d values must be >= 1");
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidParameters, "gamma must be positive");
  fit.validate();
}

std::pair<double, double> wilson_interval(int successes, int trials) {
  if (trials <= 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double n = trials;
  const double phat = successes / n;
  const double denom = 1.0 + z * z / n;
  const double centre = (phat + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

ExperimentReport run_counterexample_experiment(const std::vector<int>& d_values, double kl_tolerance) {
  const double target = 0.5 * std::log(2.0);
  ExperimentReport report;
  report.kind = "counterexample";
  double max_error = 0.0;
  for (std::size_t g = 0; g < d_values.size(); ++g) {
    const int d = d_values[g];
    const PrecisionMatrix theta1 = counterexample_precision(d);
    std::vector<int> star(static_cast<std::size_t>(d));
    std::iota(star.begin(), star.end(), 1);
    const PrecisionMatrix theta2 = project_remove_star(theta1, 0, star);
    const double kl = kl_gaussian(theta1, theta2);
    const double bound = one_edge_lower_bound(theta1);

    TrialRecord r;
    r.grid_index = g;
    r.p = d + 1;
    r.values["d"] = d;
    r.values["kl"] = kl;
    r.values["bound"] = bound;
    r.values["slack"] = kl - bound;
    r.values["abs_error"] = std::abs(kl - target);
    r.values["missing_edges"] = static_cast<double>(hamming_distance(edge_set_of(theta1), edge_set_of(theta2)));
    r.success = std::abs(kl - target) < kl_tolerance && bound <= kl + kl_tolerance;
    max_error = std::max(max_error, std::abs(kl - target));
    report.records.push_back(std::move(r));

    report.grid.push_back(summarize(report.records, g, 0, d + 1,
                                    static_cast<int>(edge_set_of(theta1).size())));
  }
  finalize_totals(report);
  report.extras["max_abs_error"] = max_error;
  report.extras["target_kl"] = target;
  return report;
}

ExperimentReport run_lower_bound_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t grid_size = cfg.dimensions.size();
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  std::vector<TrialRecord> records(grid_size * trials);

  parallel_for(records.size(), cfg.threads, [&](std::size_t k) {
    const std::size_t g = k / trials;
    const std::size_t t = k % trials;
    const int p = cfg.dimensions[g];
    TrialRecord& r = records[k];
    r.grid_index = g;
    r.trial = static_cast<int>(t);
    r.seed = trial_seed(cfg.base_seed, g, t);
    r.p = p;

    std::mt19937_64 rng(r.seed);
    const PrecisionMatrix theta_star = random_sparse_precision(p, rng, cfg.random_precision);
    const EdgeSet truth = edge_set_of(theta_star);
    std::uniform_int_distribution<std::size_t> pick(0, truth.size() - 1);
    const Edge removed = truth.edges()[pick(rng)];
    PrecisionMatrix theta = project_remove_edge(theta_star, removed);

    const bool perturbed = cfg.perturb && (t % 2 == 1);
    if (perturbed) {
      // random symmetric perturbation that keeps the removed edge at zero
      std::normal_distribution<double> normal(0.0, 1.0);
      Matrix e(p, p);
      for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) e(i, j) = e(j, i) = normal(rng);
      e(removed.i, removed.j) = e(removed.j, removed.i) = 0.0;
      double scale = 0.5 * theta.matrix().diagonal().minCoeff() / std::max(1e-300, e.norm());
      for (int attempt = 0; attempt < 60; ++attempt, scale *= 0.5) {
        Matrix cand = theta.matrix() + scale * e;
        if (Eigen::LLT<Matrix>(cand).info() == Eigen::Success) {
          theta = PrecisionMatrix(cand);
          break;
        }
      }
    }

    const BoundReport br = verify_separation(theta_star, theta);

    // Ω_∞ class parameters read off Θ* itself: α = weakest edge, h = largest diagonal.
    double alpha = std::numeric_limits<double>::infinity();
    for (const Edge& e : truth.edges()) alpha = std::min(alpha, std::abs(theta_star(e.i, e.j)));
    const double h = theta_star.matrix().diagonal().maxCoeff();
    const double omega_bound = omega_inf_lower_bound(alpha, h);

    // Equality case: projection at the edge attaining c_Θ*.
    Edge argmin = truth.edges().front();
    double best = std::numeric_limits<double>::infinity();
    for (const Edge& e : truth.edges()) {
      const double cmi = conditional_mutual_info(theta_star, e.i, e.j);
      if (cmi < best) {
        best = cmi;
        argmin = e;
      }
    }
    const double tight_slack = kl_gaussian(theta_star, project_remove_edge(theta_star, argmin)) - br.lower_bound;

    r.values["path"] = perturbed ? 1.0 : 0.0;
    r.values["kl"] = br.kl_value;
    r.values["bound"] = br.lower_bound;
    r.values["slack"] = br.slack;
    r.values["omega_inf_bound"] = omega_bound;
    r.values["omega_inf_slack"] = br.kl_value - omega_bound;
    r.values["alpha_over_h"] = alpha / h;
    r.values["tight_slack"] = tight_slack;
    r.values["condition_number"] = br.condition_number;
    r.success = br.slack >= -cfg.slack_tolerance && br.kl_value - omega_bound >= -cfg.slack_tolerance &&
                std::abs(tight_slack) <= cfg.kl_tolerance;
  });

  ExperimentReport report;
  report.kind = "lower-bound";
  report.records = std::move(records);
  for (std::size_t g = 0; g < grid_size; ++g) {
    report.grid.push_back(summarize(report.records, g, 0, cfg.dimensions[g], 0));
  }
  finalize_totals(report);
  double max_omega = 0.0, max_tight = 0.0, min_omega_slack = std::numeric_limits<double>::infinity();
  int violations = 0;
  for (const TrialRecord& r : report.records) {
    max_omega = std::max(max_omega, r.values.at("omega_inf_bound"));
    max_tight = std::max(max_tight, std::abs(r.values.at("tight_slack")));
    min_omega_slack = std::min(min_omega_slack, r.values.at("omega_inf_slack"));
    violations += r.values.at("slack") < -cfg.slack_tolerance ? 1 : 0;
  }
  report.extras["max_omega_inf_bound"] = max_omega;
  report.extras["max_abs_tight_slack"] = max_tight;
  report.extras["min_omega_inf_slack"] = min_omega_slack;
  report.extras["violations"] = violations;
  return report;
}

void check_alternatives_miss_an_edge(const std::vector<EdgeSet>& candidates) {
  if (candidates.empty()) throw Error(ErrorCode::InvalidCandidates, "no candidates");
  const EdgeSet& truth = candidates.front();
  for (std::size_t m = 1; m < candidates.size(); ++m) {
    if (truth.minus(candidates[m]).empty()) {
      throw Error(ErrorCode::InvalidCandidates,
                  "candidate " + std::to_string(m) + " contains every edge of the true graph");
    }
  }
}

ExperimentReport run_selection_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t n_sizes = cfg.sample_sizes.size();
  const std::size_t grid_size = cfg.dimensions.size() * n_sizes;
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);

  struct Model {
    PrecisionMatrix theta;
    CovarianceMatrix sigma;
    CandidateCollection candidates;
  };
  std::vector<Model> models;
  for (int p : cfg.dimensions) {
    PrecisionMatrix theta = chain_precision(p, cfg.chain_diagonal, cfg.chain_off_diagonal);
    CandidateCollection c = single_edge_deletions(edge_set_of(theta));
    check_alternatives_miss_an_edge(c.graphs());
    CovarianceMatrix sigma = invert(theta);
    models.push_back(Model{std::move(theta), std::move(sigma), std::move(c)});
  }

  std::vector<TrialRecord> records(grid_size * trials);
  parallel_for(records.size(), cfg.threads, [&](std::size_t k) {
    const std::size_t g = k / trials;
    const std::size_t t = k % trials;
    const Model& model = models[g / n_sizes];
    const int n = cfg.sample_sizes[g % n_sizes];
    TrialRecord& r = records[k];
    r.grid_index = g;
    r.trial = static_cast<int>(t);
    r.seed = trial_seed(cfg.base_seed, g, t);
    r.p = static_cast<int>(model.theta.order());
    r.n = n;

    CovarianceMatrix sigma_hat = model.sigma;
    if (!cfg.population) {
      sigma_hat = empirical_covariance(sample(model.theta, n, r.seed));
      if (cfg.use_corrected_covariance) {
        sigma_hat = corrected_covariance(sigma_hat, model.sigma.matrix().diagonal());
      }
    }
    const SelectionResult sel = select_graph(model.candidates, sigma_hat, cfg.gamma, cfg.fit);
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t m = 1; m < sel.scores.size(); ++m) gap = std::min(gap, sel.scores[m] - sel.scores[0]);
    r.success = sel.selected_index == 0;
    r.values["selected_index"] = static_cast<double>(sel.selected_index);
    r.values["true_score"] = sel.scores[0];
    r.values["gap"] = gap;
  });

  ExperimentReport report;
  report.kind = "selection";
  report.records = std::move(records);
  for (std::size_t g = 0; g < grid_size; ++g) {
    const Model& model = models[g / n_sizes];
    report.grid.push_back(summarize(report.records, g, cfg.sample_sizes[g % n_sizes],
                                    static_cast<int>(model.theta.order()),
                                    model.candidates.sparsity()));
  }
  finalize_totals(report);
  for (std::size_t d = 0; d < models.size(); ++d) {
    const std::string suffix = "_p" + std::to_string(cfg.dimensions[d]);
    const double c = c_theta_star(models[d].theta);
    report.extras["c_theta_star" + suffix] = c;
    report.extras["log_c_theta_star" + suffix] = std::log(c);
    // smallest n in the grid reaching 95% success; -1 when none does
    double threshold = -1.0;
    for (std::size_t j = 0; j < n_sizes; ++j) {
      const double n = cfg.sample_sizes[j];
      if (report.grid[d * n_sizes + j].success_rate >= 0.95 && (threshold < 0.0 || n < threshold)) {
        threshold = n;
      }
    }
    report.extras["threshold_n" + suffix] = threshold;
  }
  return report;
}

}  // namespace ggsep
