#include "ggsep/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ggsep {

CandidateCollection::CandidateCollection(std::vector<EdgeSet> graphs) : graphs_(std::move(graphs)) {
  if (graphs_.empty()) throw Error(ErrorCode::InvalidCandidates, "candidate collection is empty");
  const int p = graphs_.front().vertex_count();
  for (const EdgeSet& g : graphs_) {
    if (g.vertex_count() != p) {
      throw Error(ErrorCode::DimensionMismatch, "candidates differ in vertex count");
    }
    sparsity_ = std::max(sparsity_, static_cast<int>(g.size()));
  }
}

CandidateCollection single_edge_deletions(const EdgeSet& truth) {
  std::vector<EdgeSet> graphs{truth};
  for (const Edge& e : truth.edges()) {
    EdgeSet g = truth;
    g.erase(e);
    graphs.push_back(std::move(g));
  }
  return CandidateCollection(std::move(graphs));
}

double score(const EdgeSet& g, const CovarianceMatrix& sigma_hat, double gamma,
             const FitOptions& opts) {
  return fit_graph_mle(sigma_hat, g, gamma, opts).objective;
}

SelectionResult select_graph(const CandidateCollection& candidates,
                             const CovarianceMatrix& sigma_hat, double gamma,
                             const FitOptions& opts) {
  if (candidates.vertex_count() != sigma_hat.order()) {
    throw Error(ErrorCode::DimensionMismatch, "candidates and covariance differ in order");
  }
  SelectionResult out;
  out.scores.reserve(candidates.size());
  out.fit_results.reserve(candidates.size());
  bool any = false;
  for (const EdgeSet& g : candidates.graphs()) {
    try {
      FitResult fit = fit_graph_mle(sigma_hat, g, gamma, opts);
      out.scores.push_back(fit.objective);
      out.fit_results.emplace_back(std::move(fit));
      any = true;
    } catch (const Error& e) {
      if (e.category() == ErrorCategory::Input) throw;
      out.scores.push_back(std::numeric_limits<double>::infinity());
      out.fit_results.emplace_back(std::nullopt);
    }
  }
  if (!any) throw Error(ErrorCode::AllFitsFailed, "no candidate graph could be fitted");
  for (std::size_t m = 1; m < out.scores.size(); ++m) {
    if (out.scores[m] < out.scores[out.selected_index]) out.selected_index = m;
  }
  return out;
}

double sample_size_bound(const SampleSizeInputs& in) {
  if (!(in.tail_constant > 0.0) || !(in.gamma > 0.0) || !(in.separation > 0.0) ||
      !(in.lambda_max > 0.0) || in.p < 2 || in.s < 0 || (in.known_diagonal && in.s < 1)) {
    throw Error(ErrorCode::InvalidParameters, "sample size bound needs positive inputs and p >= 2");
  }
  double c = in.separation;
  if (in.convention == SeparationConvention::half_log) {
    if (!(in.separation > 1.0)) {
      throw Error(ErrorCode::InvalidParameters, "half_log convention needs c_theta_star > 1");
    }
    c = 0.5 * std::log(in.separation);
  }
  const double dims = in.known_diagonal ? in.s : in.p + in.s;
  const double cg = in.tail_constant * in.gamma / c;
  return 4.0 * cg * cg * in.lambda_max * in.lambda_max * dims * std::log(static_cast<double>(in.p));
}

}  // namespace ggsep
