#pragma once

// KL divergence between zero-mean Gaussians, conditional mutual information
// read off the precision matrix, and the one-missing-edge lower bounds.
// Natural logarithms throughout.

#include <optional>
#include <span>

#include "ggsep/core.hpp"

namespace ggsep {

/// KL(q1 || q2) = ½[tr(Θ₂ Θ₁⁻¹) − p + log det Θ₁ − log det Θ₂].
double kl_gaussian(const PrecisionMatrix& theta1, const PrecisionMatrix& theta2);

/// I(X_i; X_j | rest) = ½ log(Θᵢᵢ Θⱼⱼ / (Θᵢᵢ Θⱼⱼ − Θᵢⱼ²)).
double conditional_mutual_info(const PrecisionMatrix& theta, int i, int j);

/// I(X_i; X_S | X_rest) from conditional log-determinants of the covariance.
/// With rest empty this is the unconditional mutual information.
double block_conditional_mutual_info(const PrecisionMatrix& theta, int i, std::span<const int> s);

/// Separation constant: minimum of Θᵢᵢ Θⱼⱼ / (Θᵢᵢ Θⱼⱼ − Θᵢⱼ²) over edges with
/// |Θᵢⱼ| > zero_tol. Throws NoEdges for a diagonal matrix.
double c_theta_star(const PrecisionMatrix& theta, double zero_tol = kDefaultZeroTol);

/// ½ log c_Θ*: KL lower bound when at least one true edge is missing.
double one_edge_lower_bound(const PrecisionMatrix& theta_star, double zero_tol = kDefaultZeroTol);

/// ½ log(1 / (1 − α²/h²)), the bound over Ω_∞(α, h).
double omega_inf_lower_bound(double alpha, double h);

struct BoundReport {
  double kl_value = 0.0;
  double lower_bound = 0.0;
  double slack = 0.0;
  std::optional<Edge> witness_edge;
  /// Condition number of Θ*; useful when a slack check fails.
  double condition_number = 0.0;
};

/// Compares KL(q_Θ* || q_Θ) with ½ log c_Θ*. Requires an edge of Θ* that is
/// absent from Θ (NoMissingEdge otherwise). The witness is the first missing
/// edge in lexicographic order.
BoundReport verify_separation(const PrecisionMatrix& theta_star, const PrecisionMatrix& theta,
                              double zero_tol = kDefaultZeroTol);

}  // namespace ggsep
