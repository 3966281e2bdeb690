#include "ggsep/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace ggsep {

namespace {

void check_vertex(const PrecisionMatrix& theta, int v) {
  if (v < 0 || v >= theta.order()) {
    throw Error(ErrorCode::IndexOutOfRange, "vertex " + std::to_string(v) + " outside matrix");
  }
}

double pair_ratio(const Matrix& m, Eigen::Index i, Eigen::Index j) {
  const double diag = m(i, i) * m(j, j);
  return diag / (diag - m(i, j) * m(i, j));
}

// log det of Cov(X_A | X_R), where A ∪ R indexes a subset of the variables.
double conditional_log_det(const CovarianceMatrix& sigma, std::span<const int> a,
                           std::span<const int> r) {
  if (r.empty()) {
    return factorize_matrix(submatrix(sigma.matrix(), a, a)).log_determinant();
  }
  std::vector<int> joint(a.begin(), a.end());
  joint.insert(joint.end(), r.begin(), r.end());
  const CovarianceMatrix sub(submatrix(sigma.matrix(), joint, joint));
  std::vector<int> keep(a.size());
  std::iota(keep.begin(), keep.end(), 0);
  return factorize(schur_complement(sub, keep)).log_determinant();
}

}  // namespace

double kl_gaussian(const PrecisionMatrix& theta1, const PrecisionMatrix& theta2) {
  if (theta1.order() != theta2.order()) {
    throw Error(ErrorCode::DimensionMismatch, "precision matrices differ in order");
  }
  const SpdFactorization f1 = factorize(theta1);
  const SpdFactorization f2 = factorize(theta2);
  const Matrix sigma1 = f1.inverse();
  const double trace = (theta2.matrix().cwiseProduct(sigma1)).sum();
  const double p = static_cast<double>(theta1.order());
  return 0.5 * (trace - p + f1.log_determinant() - f2.log_determinant());
}

double conditional_mutual_info(const PrecisionMatrix& theta, int i, int j) {
  check_vertex(theta, i);
  check_vertex(theta, j);
  if (i == j) throw Error(ErrorCode::SameVertex, "conditional mutual info needs i != j");
  if (theta(i, j) == 0.0) return 0.0;
  return 0.5 * std::log(pair_ratio(theta.matrix(), i, j));
}

double block_conditional_mutual_info(const PrecisionMatrix& theta, int i, std::span<const int> s) {
  check_vertex(theta, i);
  if (s.empty()) throw Error(ErrorCode::EmptyIndexSet, "conditioning block S is empty");
  std::vector<int> sorted(s.begin(), s.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::IndexOverlap, "S has duplicate vertices");
  }
  for (int v : sorted) {
    check_vertex(theta, v);
    if (v == i) throw Error(ErrorCode::IndexOverlap, "vertex i belongs to S");
  }

  std::vector<int> joint{i};
  joint.insert(joint.end(), sorted.begin(), sorted.end());
  const std::vector<int> rest = complement_of(joint, static_cast<int>(theta.order()));
  const std::vector<int> single{i};

  const CovarianceMatrix sigma = invert(theta);
  const double h_i = conditional_log_det(sigma, single, rest);
  const double h_s = conditional_log_det(sigma, sorted, rest);
  const double h_joint = conditional_log_det(sigma, joint, rest);
  return 0.5 * (h_i + h_s - h_joint);
}

double c_theta_star(const PrecisionMatrix& theta, double zero_tol) {
  const Matrix& m = theta.matrix();
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      if (std::abs(m(i, j)) > zero_tol) {
        best = std::min(best, pair_ratio(m, i, j));
        any = true;
      }
    }
  }
  if (!any) throw Error(ErrorCode::NoEdges, "precision matrix has no off-diagonal support");
  return best;
}

double one_edge_lower_bound(const PrecisionMatrix& theta_star, double zero_tol) {
  return 0.5 * std::log(c_theta_star(theta_star, zero_tol));
}

double omega_inf_lower_bound(double alpha, double h) {
  if (!(alpha > 0.0) || !(h > 0.0) || !(alpha < h)) {
    throw Error(ErrorCode::InvalidParameters, "omega_inf bound requires 0 < alpha < h");
  }
  const double r = alpha / h;
  return -0.5 * std::log1p(-r * r);
}

BoundReport verify_separation(const PrecisionMatrix& theta_star, const PrecisionMatrix& theta,
                              double zero_tol) {
  if (theta_star.order() != theta.order()) {
    throw Error(ErrorCode::DimensionMismatch, "precision matrices differ in order");
  }
  const EdgeSet missing = edge_set_of(theta_star, zero_tol).minus(edge_set_of(theta, zero_tol));
  if (missing.empty()) {
    throw Error(ErrorCode::NoMissingEdge, "every edge of the true graph is present in the candidate");
  }
  BoundReport report;
  report.kl_value = kl_gaussian(theta_star, theta);
  report.lower_bound = one_edge_lower_bound(theta_star, zero_tol);
  report.slack = report.kl_value - report.lower_bound;
  report.witness_edge = missing.edges().front();
  report.condition_number = condition_number(theta_star.matrix());
  return report;
}

}  // namespace ggsep
