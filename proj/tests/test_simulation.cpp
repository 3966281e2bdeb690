#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "ggsep/divergence.hpp"
#include "ggsep/simulation.hpp"
#include "oracles.hpp"

using namespace ggsep;

namespace {

bool same_records(const ExperimentReport& a, const ExperimentReport& b) {
  if (a.records.size() != b.records.size()) return false;
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    const TrialRecord& x = a.records[k];
    const TrialRecord& y = b.records[k];
    if (x.seed != y.seed || x.success != y.success || x.values != y.values || x.grid_index != y.grid_index ||
        x.trial != y.trial)
      return false;
  }
  return a.success_rate == b.success_rate && a.min_slack == b.min_slack && a.mean_kl == b.mean_kl;
}

}  // namespace

TEST_CASE("sample: identity covariance at n = 1e5") {
  const CovarianceMatrix s = empirical_covariance(sample(PrecisionMatrix(Matrix::Identity(4, 4)), 100000, 7));
  CHECK((s.matrix() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("sample: star family covariance at n = 1e5") {
  const int n = 100000;
  for (int d = 1; d <= 4; ++d) {
    const PrecisionMatrix t = counterexample_precision(d);
    const Matrix expected = oracle::inverse(t.matrix());
    const Matrix got = empirical_covariance(sample(t, n, 100 + d)).matrix();
    if (d == 2) CHECK((got - expected).cwiseAbs().maxCoeff() < 0.05);
    // Var(x_i x_j) = σ_ii σ_jj + σ_ij² for a zero-mean Gaussian; allow four standard errors
    for (int i = 0; i <= d; ++i)
      for (int j = 0; j <= d; ++j) {
        const double se = std::sqrt((expected(i, i) * expected(j, j) + expected(i, j) * expected(i, j)) / n);
        CHECK(std::abs(got(i, j) - expected(i, j)) < 4.0 * se);
      }
  }
}

TEST_CASE("sample: seeded and reproducible") {
  const PrecisionMatrix t = chain_precision(5, 2.0, 1.0);
  const SampleMatrix a = sample(t, 50, 99);
  const SampleMatrix b = sample(t, 50, 99);
  const SampleMatrix c = sample(t, 50, 100);
  CHECK(a.rows() == b.rows());
  CHECK(a.rows() != c.rows());
  CHECK(a.n() == 50);
  CHECK(a.p() == 5);
  CHECK_THROWS_AS(sample(t, 0, 1), Error);
}

TEST_CASE("empirical_covariance: examples") {
  Matrix x(1, 3);
  x << 1, -2, 3;
  CHECK(empirical_covariance(SampleMatrix(x)).matrix() == x.transpose() * x);

  Matrix rows(2, 2);
  rows << 2, 0, 0, 2;
  const Matrix s = empirical_covariance(SampleMatrix(rows)).matrix();
  CHECK(s(0, 1) == 0.0);
  CHECK(s(0, 0) == doctest::Approx(2.0));

  Matrix bad = Matrix::Ones(2, 2);
  bad(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(SampleMatrix{bad}, Error);
}

TEST_CASE("corrected_covariance") {
  Matrix s(2, 2);
  s << 1.1, 0.3, 0.3, 0.9;
  const CovarianceMatrix sigma(s);
  const Matrix c = corrected_covariance(sigma, Vector::Ones(2)).matrix();
  CHECK(c(0, 0) == 1.0);
  CHECK(c(1, 1) == 1.0);
  CHECK(c(0, 1) == 0.3);
  CHECK(corrected_covariance(sigma, s.diagonal()).matrix() == s);
  try {
    corrected_covariance(sigma, Vector::Ones(3));
    FAIL("expected InvalidDiagonal");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidDiagonal);
  }
  CHECK_THROWS_AS(corrected_covariance(sigma, Eigen::Vector2d(1.0, 0.0)), Error);
}

TEST_CASE("counterexample_precision: matrices and moments") {
  Matrix d1(2, 2);
  d1 << 2, -1, -1, 1;
  CHECK(counterexample_precision(1).matrix() == d1);
  Matrix d2(3, 3);
  d2 << 2, 1, -1, 1, 2, -1, -1, -1, 1;
  CHECK(counterexample_precision(2).matrix() == d2);

  for (int d = 1; d <= 8; ++d) {
    const Matrix s = oracle::inverse(counterexample_precision(d).matrix());
    CHECK(s(d, d) == doctest::Approx(d + 1.0));
    for (int i = 0; i < d; ++i) {
      CHECK(s(i, d) == doctest::Approx(1.0));
      CHECK(s(i, i) == doctest::Approx(1.0));
    }
  }
  CHECK_THROWS_AS(counterexample_precision(0), Error);
}

TEST_CASE("chain_precision and trial_seed") {
  const PrecisionMatrix t = chain_precision(5, 2.0, 1.0);
  CHECK(edge_set_of(t).size() == 4);
  CHECK(t(0, 1) == 1.0);
  CHECK(t(0, 2) == 0.0);
  CHECK(t(4, 4) == 2.0);

  std::set<std::uint64_t> seeds;
  for (std::size_t g = 0; g < 20; ++g)
    for (std::size_t k = 0; k < 50; ++k) seeds.insert(trial_seed(1, g, k));
  CHECK(seeds.size() == 1000);
  CHECK(trial_seed(5, 3, 4) == trial_seed(5, 3, 4));
  CHECK(trial_seed(5, 3, 4) != trial_seed(6, 3, 4));
}

TEST_CASE("random_sparse_precision: dominant, PD, at least one edge") {
  std::mt19937_64 rng(51);
  const RandomPrecisionOptions opts;
  for (int trial = 0; trial < 500; ++trial) {
    const int p = 2 + static_cast<int>(rng() % 11);
    const PrecisionMatrix t = random_sparse_precision(p, rng, opts);
    const Matrix& m = t.matrix();
    const EdgeSet g = edge_set_of(t);
    CHECK(g.size() >= 1);
    for (const Edge& e : g.edges()) {
      CHECK(std::abs(m(e.i, e.j)) >= opts.min_magnitude);
      CHECK(std::abs(m(e.i, e.j)) <= opts.max_magnitude);
    }
    for (int i = 0; i < p; ++i) CHECK(m(i, i) > m.row(i).cwiseAbs().sum() - m(i, i));
  }
}

TEST_CASE("wilson_interval") {
  // 97.5% normal quantile; with no successes centre = half = (z²/2n) / (1 + z²/n)
  const double z = 1.959963984540054;
  const auto [lo, hi] = wilson_interval(0, 10);
  CHECK(lo == 0.0);
  CHECK(hi == doctest::Approx(2.0 * (z * z / 20.0) / (1.0 + z * z / 10.0)).epsilon(1e-12));
  const auto [lo2, hi2] = wilson_interval(10, 10);
  CHECK(hi2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lo2 == doctest::Approx(1.0 - hi).epsilon(1e-12));
  const auto [lo3, hi3] = wilson_interval(37, 100);
  CHECK(lo3 < 0.37);
  CHECK(hi3 > 0.37);
}

TEST_CASE("run_counterexample_experiment: flat at half log 2") {
  const ExperimentReport r = run_counterexample_experiment({1, 2, 3, 4, 5, 6, 7, 8});
  CHECK(r.records.size() == 8);
  CHECK(r.grid.size() == 8);
  CHECK(r.success_rate == 1.0);
  CHECK(r.extras.at("max_abs_error") < 1e-8);
  for (const TrialRecord& rec : r.records) {
    CHECK(std::abs(rec.values.at("kl") - 0.3465735903) < 1e-8);
    CHECK(rec.values.at("missing_edges") == rec.values.at("d"));
  }
}

TEST_CASE("run_lower_bound_experiment: no violations and thread independence") {
  ExperimentConfig cfg;
  cfg.base_seed = 3;
  cfg.trials = 100;
  cfg.dimensions = {3, 5, 8};
  cfg.threads = 1;
  const ExperimentReport a = run_lower_bound_experiment(cfg);
  CHECK(a.records.size() == 300);
  CHECK(a.grid.size() == 3);
  CHECK(a.min_slack >= -1e-9);
  CHECK(a.success_rate == 1.0);
  CHECK(a.extras.at("violations") == 0.0);
  CHECK(a.extras.at("max_abs_tight_slack") < 1e-8);
  cfg.threads = 4;
  CHECK(same_records(a, run_lower_bound_experiment(cfg)));
}

TEST_CASE("run_selection_experiment: population limit and determinism") {
  ExperimentConfig cfg;
  cfg.dimensions = {5};
  cfg.sample_sizes = {1};
  cfg.trials = 3;
  cfg.population = true;
  const ExperimentReport pop = run_selection_experiment(cfg);
  CHECK(pop.success_rate == 1.0);
  const double log_c = std::log(c_theta_star(chain_precision(5, 2.0, 1.0)));
  for (const TrialRecord& r : pop.records) CHECK(r.values.at("gap") >= log_c - 1e-6);

  cfg.population = false;
  cfg.sample_sizes = {20, 200};
  cfg.trials = 10;
  cfg.threads = 1;
  const ExperimentReport a = run_selection_experiment(cfg);
  CHECK(a.records.size() == 20);
  CHECK(a.grid.size() == 2);
  CHECK(a.grid[0].n == 20);
  CHECK(a.grid[1].s == 4);
  cfg.threads = 3;
  CHECK(same_records(a, run_selection_experiment(cfg)));
}

TEST_CASE("experiment configuration and candidate checks") {
  ExperimentConfig cfg;
  cfg.trials = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = ExperimentConfig{};
  cfg.sample_sizes = {};
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = ExperimentConfig{};
  cfg.dimensions = {1};
  CHECK_THROWS_AS(cfg.validate(), Error);

  EdgeSet truth(3);
  truth.insert(Edge(0, 1));
  try {
    check_alternatives_miss_an_edge({truth, EdgeSet::complete(3)});
    FAIL("expected InvalidCandidates");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidCandidates);
  }
  CHECK_NOTHROW(check_alternatives_miss_an_edge({truth, EdgeSet(3)}));
}
