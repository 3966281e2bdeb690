#include "ggsep/projection.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace ggsep {

namespace {

using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

void check_vertex(Eigen::Index p, int v) {
  if (v < 0 || v >= p) {
    throw Error(ErrorCode::IndexOutOfRange, "vertex " + std::to_string(v) + " outside matrix");
  }
}

// Replaces the (a, b) cross-covariance block with its value under
// X_a ⟂ X_b | X_rest and returns the resulting precision matrix, with the
// (a, b) block set to exact zero.
PrecisionMatrix separate_blocks(const PrecisionMatrix& theta1, std::span<const int> a,
                                std::span<const int> b) {
  const int p = static_cast<int>(theta1.order());
  std::vector<int> joint(a.begin(), a.end());
  joint.insert(joint.end(), b.begin(), b.end());
  const std::vector<int> rest = complement_of(joint, p);

  Matrix sigma = invert(theta1).matrix();
  Matrix cross = Matrix::Zero(static_cast<Eigen::Index>(a.size()),
                              static_cast<Eigen::Index>(b.size()));
  if (!rest.empty()) {
    const Matrix s_ar = submatrix(sigma, a, rest);
    const Matrix s_rb = submatrix(sigma, rest, b);
    const SpdFactorization rr = factorize_matrix(submatrix(sigma, rest, rest));
    cross = s_ar * rr.solve(s_rb);
  }
  for (std::size_t x = 0; x < a.size(); ++x) {
    for (std::size_t y = 0; y < b.size(); ++y) {
      sigma(a[x], b[y]) = cross(x, y);
      sigma(b[y], a[x]) = cross(x, y);
    }
  }
  Matrix theta2 = factorize_matrix(sigma).inverse();
  for (int u : a) {
    for (int w : b) {
      theta2(u, w) = 0.0;
      theta2(w, u) = 0.0;
    }
  }
  return PrecisionMatrix(theta2);
}

// Cholesky-based objective and gradient on raw matrices. Empty when the
// point is outside the PD cone.
struct Evaluation {
  double objective;
  Matrix gradient;
  Matrix factor;  // lower Cholesky factor of the iterate
};

std::optional<Evaluation> evaluate(const Matrix& theta, const Matrix& sigma_hat) {
  Eigen::LLT<Matrix> llt(theta);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Matrix& l = llt.matrixLLT();
  double log_det = 0.0;
  for (Eigen::Index k = 0; k < l.rows(); ++k) {
    const double d = l(k, k);
    if (!(d > 0.0) || !std::isfinite(d)) return std::nullopt;
    log_det += std::log(d);
  }
  log_det *= 2.0;
  const double f = -log_det + sigma_hat.cwiseProduct(theta).sum();
  if (!std::isfinite(f)) return std::nullopt;
  Matrix inv = llt.solve(Matrix::Identity(theta.rows(), theta.cols()));
  Matrix grad = sigma_hat - 0.5 * (inv + inv.transpose());
  return Evaluation{f, std::move(grad), llt.matrixL()};
}

// ℓ(Θ + Δ) − ℓ(Θ) = −Σ log1p(λ_k) + tr(Σ̂ Δ), λ the eigenvalues of L⁻¹ Δ L⁻ᵀ.
// Stays accurate when the change is far below the objective's rounding error.
double objective_change(const Matrix& factor, const Matrix& delta, const Matrix& sigma_hat) {
  const auto l = factor.triangularView<Eigen::Lower>();
  const Matrix half = l.solve(delta);
  Matrix m = l.solve(half.transpose());
  m = 0.5 * (m + m.transpose()).eval();
  const Vector lambda = Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues();
  double log_det_change = 0.0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) log_det_change += std::log1p(lambda(k));
  return -log_det_change + sigma_hat.cwiseProduct(delta).sum();
}

void project_feasible(Matrix& t, const Mask& mask, double gamma) {
  for (Eigen::Index j = 0; j < t.cols(); ++j)
    for (Eigen::Index i = 0; i < t.rows(); ++i)
      if (!mask(i, j)) t(i, j) = 0.0;
  const double norm = t.norm();
  if (norm > gamma) t *= gamma / norm;
}

double inner(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

}  // namespace

PrecisionMatrix project_remove_edge(const PrecisionMatrix& theta1, Edge e) {
  check_vertex(theta1.order(), e.i);
  check_vertex(theta1.order(), e.j);
  if (e.i == e.j) throw Error(ErrorCode::SameVertex, "edge endpoints coincide");
  if (theta1(e.i, e.j) == 0.0) return theta1;
  const int a[] = {e.i};
  const int b[] = {e.j};
  return separate_blocks(theta1, a, b);
}

PrecisionMatrix project_remove_star(const PrecisionMatrix& theta1, int v, std::span<const int> n) {
  check_vertex(theta1.order(), v);
  if (n.empty()) throw Error(ErrorCode::EmptyIndexSet, "neighbour set is empty");
  std::vector<int> sorted(n.begin(), n.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::IndexOverlap, "neighbour set has duplicates");
  }
  for (int u : sorted) {
    check_vertex(theta1.order(), u);
    if (u == v) throw Error(ErrorCode::IndexOverlap, "centre vertex belongs to the neighbour set");
  }
  const int a[] = {v};
  return separate_blocks(theta1, a, sorted);
}

double nll(const PrecisionMatrix& theta, const CovarianceMatrix& sigma_hat) {
  if (theta.order() != sigma_hat.order()) {
    throw Error(ErrorCode::DimensionMismatch, "nll: orders differ");
  }
  const SpdFactorization f = factorize(theta);
  return -f.log_determinant() + inner(sigma_hat.matrix(), theta.matrix());
}

Matrix nll_gradient(const PrecisionMatrix& theta, const CovarianceMatrix& sigma_hat) {
  if (theta.order() != sigma_hat.order()) {
    throw Error(ErrorCode::DimensionMismatch, "nll_gradient: orders differ");
  }
  return sigma_hat.matrix() - factorize(theta).inverse();
}

void FitOptions::validate() const {
  if (max_iterations < 1 || !(gradient_tolerance > 0.0) || !(initial_step > 0.0) ||
      !(backtracking_ratio > 0.0 && backtracking_ratio < 1.0) || !(armijo_constant > 0.0 && armijo_constant < 1.0)) {
    throw Error(ErrorCode::InvalidParameters, "invalid fit options");
  }
}

FitResult fit_graph_mle(const CovarianceMatrix& sigma_hat, const EdgeSet& g, double gamma,
                        const FitOptions& opts) {
  opts.validate();
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidParameters, "gamma must be positive");
  const Eigen::Index p = sigma_hat.order();
  if (g.vertex_count() != p) throw Error(ErrorCode::DimensionMismatch, "graph and covariance differ in order");
  if (p < 2) throw Error(ErrorCode::InvalidParameters, "fit needs at least two variables");
  const Matrix& s = sigma_hat.matrix();
  for (Eigen::Index k = 0; k < p; ++k) {
    if (!(s(k, k) > 0.0)) {
      throw Error(ErrorCode::InfeasibleStart, "covariance diagonal must be positive to initialise");
    }
  }

  const Mask mask = g.support_mask();
  Matrix theta = s.diagonal().cwiseInverse().asDiagonal();
  project_feasible(theta, mask, gamma);

  std::optional<Evaluation> current = evaluate(theta, s);
  if (!current) throw Error(ErrorCode::InfeasibleStart, "diagonal start is not positive definite");

  std::vector<double> trace;
  if (opts.record_trace) trace.push_back(current->objective);

  auto projected_gradient = [&](const Matrix& t, const Matrix& grad) {
    Matrix moved = t - grad;
    project_feasible(moved, mask, gamma);
    return (moved - t).norm();
  };

  double step = opts.initial_step;
  int iterations = 0;
  double pg_norm = projected_gradient(theta, current->gradient);

  while (iterations < opts.max_iterations && pg_norm > opts.gradient_tolerance) {
    double t = step;
    std::optional<Evaluation> next;
    Matrix candidate;
    double change = 0.0;
    for (int bt = 0; bt < 200; ++bt) {
      candidate = theta - t * current->gradient;
      project_feasible(candidate, mask, gamma);
      next = evaluate(candidate, s);
      if (next) {
        const Matrix delta = candidate - theta;
        change = objective_change(current->factor, delta, s);
        if (change <= opts.armijo_constant * inner(current->gradient, delta) && change <= 0.0) break;
      }
      next.reset();
      t *= opts.backtracking_ratio;
    }
    if (!next || candidate == theta) break;  // no representable descent step left
    next->objective = current->objective + change;

    const Matrix ds = candidate - theta;
    const Matrix dy = next->gradient - current->gradient;
    const double sy = inner(ds, dy);
    step = sy > 0.0 ? std::clamp(inner(ds, ds) / sy, 1e-12, 1e12) : opts.initial_step;

    theta = std::move(candidate);
    current = std::move(next);
    ++iterations;
    if (opts.record_trace) trace.push_back(current->objective);
    pg_norm = projected_gradient(theta, current->gradient);
  }

  FitResult result{PrecisionMatrix(theta), current->objective, iterations,
                   pg_norm <= opts.gradient_tolerance, pg_norm, std::move(trace)};
  return result;
}

}  // namespace ggsep
