#pragma once

// Seeded Gaussian sampling, empirical covariances, the flat-KL star family,
// and the experiment drivers that check the KL bounds numerically.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ggsep/core.hpp"
#include "ggsep/projection.hpp"

namespace ggsep {

/// n observations of a p-dimensional vector, one per row.
class SampleMatrix {
 public:
  explicit SampleMatrix(Matrix rows);

  Eigen::Index n() const noexcept { return rows_.rows(); }
  Eigen::Index p() const noexcept { return rows_.cols(); }
  const Matrix& rows() const noexcept { return rows_; }

 private:
  Matrix rows_;
};

/// n i.i.d. draws from N(0, Θ⁻¹): x = L⁻ᵀ z with Θ = L Lᵀ and z standard
/// normal from a generator seeded with `seed`.
SampleMatrix sample(const PrecisionMatrix& theta, int n, std::uint64_t seed);

/// Known-zero-mean covariance (1/n) Σ xᵢ xᵢᵀ.
CovarianceMatrix empirical_covariance(const SampleMatrix& x);

/// Σ̂ with its diagonal overwritten by `true_diag`.
CovarianceMatrix corrected_covariance(const CovarianceMatrix& sigma_hat, const Vector& true_diag);

/// Precision of (X₁..X_d, X_{d+1} = ΣXᵢ + W) with independent standard
/// normal Xᵢ and W: 2 on the leading diagonal, 1 among the first d, −1 in the
/// last row and column, 1 in the corner.
PrecisionMatrix counterexample_precision(int d);

/// Tridiagonal precision of a path graph.
PrecisionMatrix chain_precision(int p, double diagonal, double off_diagonal);

/// Mixes the base seed with a grid position and trial index (splitmix64).
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t grid_index, std::size_t trial);

struct RandomPrecisionOptions {
  double edge_probability = 0.4;
  double min_magnitude = 0.2;
  double max_magnitude = 1.0;
  double min_margin = 0.05;
  double max_margin = 1.0;
};

/// Random sparse diagonally dominant precision matrix with at least one
/// edge: off-diagonals ±u on a random edge set, diagonal = absolute row sum
/// plus a random margin.
PrecisionMatrix random_sparse_precision(int p, std::mt19937_64& rng,
                                        const RandomPrecisionOptions& opts = {});

struct ExperimentConfig {
  std::uint64_t base_seed = 0;
  int trials = 1;
  std::vector<int> dimensions{8};
  std::vector<int> sample_sizes{100};
  std::vector<int> d_values{1, 2, 3, 4, 5, 6, 7, 8};
  double gamma = 10.0;

  // selection experiment: chain model and covariance variant
  double chain_diagonal = 2.0;
  double chain_off_diagonal = 1.0;
  bool use_corrected_covariance = false;
  bool population = false;

  // lower-bound experiment
  RandomPrecisionOptions random_precision{};
  bool perturb = true;

  double slack_tolerance = 1e-9;
  double kl_tolerance = 1e-8;
  FitOptions fit{};
  /// Worker threads; 0 uses the hardware concurrency. Results do not depend
  /// on this value.
  int threads = 0;

  void validate() const;
};

struct TrialRecord {
  std::size_t grid_index = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  int p = 0;
  int n = 0;
  bool success = false;
  std::map<std::string, double> values;
};

struct GridSummary {
  int n = 0;
  int p = 0;
  int s = 0;
  int trials = 0;
  double success_rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double mean_gap = 0.0;
  double mean_kl = 0.0;
  double min_slack = 0.0;
};

struct ExperimentReport {
  std::string kind;
  std::vector<TrialRecord> records;
  std::vector<GridSummary> grid;
  double success_rate = 0.0;
  double min_slack = 0.0;
  double mean_kl = 0.0;
  std::map<std::string, double> extras;
};

/// 95% Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(int successes, int trials);

/// For each d: KL(q₁ || q₂*) with q₂* the star projection at vertex 0 of
/// counterexample_precision(d), against ½ log 2 and the one-edge bound.
ExperimentReport run_counterexample_experiment(const std::vector<int>& d_values,
                                               double kl_tolerance = 1e-8);

/// Random (Θ*, Θ) pairs where Θ misses at least one edge of Θ*; records the
/// slack of the one-edge and Ω_∞ bounds.
ExperimentReport run_lower_bound_experiment(const ExperimentConfig& cfg);

/// Chain-model selection sweep over (p, n): the true graph against all its
/// single-edge deletions.
ExperimentReport run_selection_experiment(const ExperimentConfig& cfg);

/// Throws InvalidCandidates if some alternative contains every edge of the
/// first (true) candidate.
void check_alternatives_miss_an_edge(const std::vector<EdgeSet>& candidates);

}  // namespace ggsep
