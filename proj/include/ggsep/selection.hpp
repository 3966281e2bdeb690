#pragma once

// Likelihood scores over candidate graphs and the minimum-score selector.

#include <optional>
#include <vector>

#include "ggsep/core.hpp"
#include "ggsep/projection.hpp"

namespace ggsep {

/// Ordered candidate graphs on a common vertex set. sparsity() counts edges
/// only; the diagonal is always free.
class CandidateCollection {
 public:
  explicit CandidateCollection(std::vector<EdgeSet> graphs);

  const std::vector<EdgeSet>& graphs() const noexcept { return graphs_; }
  std::size_t size() const noexcept { return graphs_.size(); }
  int vertex_count() const noexcept { return graphs_.front().vertex_count(); }
  int sparsity() const noexcept { return sparsity_; }

 private:
  std::vector<EdgeSet> graphs_;
  int sparsity_ = 0;
};

/// The true graph followed by every graph obtained by deleting one of its
/// edges.
CandidateCollection single_edge_deletions(const EdgeSet& truth);

struct SelectionResult {
  std::size_t selected_index = 0;
  /// +inf for candidates whose fit threw.
  std::vector<double> scores;
  /// Empty entries for candidates whose fit threw.
  std::vector<std::optional<FitResult>> fit_results;
};

/// S(G): the minimized negative log-likelihood of fit_graph_mle.
double score(const EdgeSet& g, const CovarianceMatrix& sigma_hat, double gamma,
             const FitOptions& opts = {});

/// Fits every candidate and returns the lowest score, ties to the lowest
/// index. Throws AllFitsFailed when no candidate can be fitted.
SelectionResult select_graph(const CandidateCollection& candidates,
                             const CovarianceMatrix& sigma_hat, double gamma,
                             const FitOptions& opts = {});

/// How the separation constant enters the sample-size formula.
enum class SeparationConvention {
  /// Use the supplied value as-is.
  raw,
  /// Use ½ log of the supplied value (the KL bound itself).
  half_log,
};

struct SampleSizeInputs {
  double tail_constant = 1.0;   // C
  double gamma = 1.0;
  double separation = 1.0;      // c_Θ* (interpreted per `convention`)
  double lambda_max = 1.0;      // largest eigenvalue of Σ*
  int p = 2;
  int s = 0;                    // edges per candidate, diagonal excluded
  SeparationConvention convention = SeparationConvention::raw;
  /// Σ̂ diagonal replaced by the known diagonal: (p + s) becomes s.
  bool known_diagonal = false;
};

/// n ≥ 4 C² γ² / c² · λ_max² · (p + s) · log p.
double sample_size_bound(const SampleSizeInputs& in);

}  // namespace ggsep
