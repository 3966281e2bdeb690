#pragma once

// Information projections onto graphs with missing edges, and the
// support-constrained Gaussian maximum-likelihood fit.

#include <limits>
#include <span>
#include <vector>

#include "ggsep/core.hpp"

namespace ggsep {

/// Disables the Frobenius-ball constraint in fit_graph_mle.
inline constexpr double kNoBall = std::numeric_limits<double>::infinity();

/// KL-closest Gaussian to q_Θ₁ with X_i ⟂ X_j | rest. Keeps every covariance
/// entry except Cov(X_i, X_j), which becomes Σ_iV Σ_VV⁻¹ Σ_Vj (zero when
/// V is empty). The returned Θ(i,j) is exactly zero.
PrecisionMatrix project_remove_edge(const PrecisionMatrix& theta1, Edge e);

/// KL-closest Gaussian to q_Θ₁ with X_v ⟂ X_N | X_R, R the remaining
/// vertices. Cov(X_v, X_N) becomes Σ_vR Σ_RR⁻¹ Σ_RN (zero when R is empty);
/// Θ(v,u) is exactly zero for u in N.
PrecisionMatrix project_remove_star(const PrecisionMatrix& theta1, int v, std::span<const int> n);

/// ℓ(Θ) = −log det Θ + tr(Σ̂ Θ). Σ̂ may be singular.
double nll(const PrecisionMatrix& theta, const CovarianceMatrix& sigma_hat);

/// ∇ℓ(Θ) = Σ̂ − Θ⁻¹.
Matrix nll_gradient(const PrecisionMatrix& theta, const CovarianceMatrix& sigma_hat);

struct FitOptions {
  int max_iterations = 5000;
  double gradient_tolerance = 1e-8;
  double initial_step = 1.0;
  double backtracking_ratio = 0.5;
  double armijo_constant = 1e-4;
  /// Keep the objective value of every accepted iterate.
  bool record_trace = false;

  void validate() const;
};

struct FitResult {
  PrecisionMatrix theta_hat;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double projected_gradient_norm = 0.0;
  std::vector<double> objective_trace;
};

/// Minimizes ℓ over {Θ ≻ 0, supp(Θ) ⊆ E(G) ∪ diag, ‖Θ‖_F ≤ γ} by projected
/// gradient descent with Armijo backtracking. Steps after the first start
/// from the Barzilai–Borwein length. A run that exhausts max_iterations
/// returns its best iterate with converged == false.
FitResult fit_graph_mle(const CovarianceMatrix& sigma_hat, const EdgeSet& g, double gamma,
                        const FitOptions& opts = {});

}  // namespace ggsep
