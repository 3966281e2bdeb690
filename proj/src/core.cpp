#include "ggsep/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ggsep {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::EmptyIndexSet: return "EmptyIndexSet";
    case ErrorCode::SameVertex: return "SameVertex";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::IndexOverlap: return "IndexOverlap";
    case ErrorCode::NoEdges: return "NoEdges";
    case ErrorCode::NoMissingEdge: return "NoMissingEdge";
    case ErrorCode::InfeasibleStart: return "InfeasibleStart";
    case ErrorCode::InvalidDiagonal: return "InvalidDiagonal";
    case ErrorCode::InvalidCandidates: return "InvalidCandidates";
    case ErrorCode::AllFitsFailed: return "AllFitsFailed";
    case ErrorCode::DidNotConverge: return "DidNotConverge";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::NotSymmetric:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::InvalidParameters:
      return ErrorCategory::Input;
    case ErrorCode::DidNotConverge:
      return ErrorCategory::Convergence;
    default:
      return ErrorCategory::MathDomain;
  }
}

namespace {

Matrix symmetric_part(const Matrix& entries, const char* what) {
  if (entries.rows() != entries.cols()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " must be square");
  }
  if (!entries.allFinite()) {
    throw Error(ErrorCode::NotPositiveDefinite, std::string(what) + " has non-finite entries");
  }
  const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
  const double asym = (entries - entries.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) {
    throw Error(ErrorCode::NotSymmetric, std::string(what) + " is not symmetric");
  }
  Matrix sym = 0.5 * (entries + entries.transpose());
  return sym;
}

}  // namespace

SpdFactorization factorize_matrix(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "factorize expects a nonempty square matrix");
  }
  if (!m.allFinite()) {
    throw Error(ErrorCode::NotPositiveDefinite, "matrix has non-finite entries");
  }
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, "Cholesky pivot is not positive");
  }
  Matrix l = llt.matrixL();
  double log_det = 0.0;
  for (Eigen::Index k = 0; k < l.rows(); ++k) {
    const double d = l(k, k);
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw Error(ErrorCode::NotPositiveDefinite, "Cholesky pivot is not positive");
    }
    log_det += std::log(d);
  }
  return SpdFactorization(std::move(l), 2.0 * log_det);
}

Matrix SpdFactorization::solve(const Matrix& rhs) const {
  const auto l = factor_.triangularView<Eigen::Lower>();
  Matrix y = l.solve(rhs);
  return l.transpose().solve(y);
}

Matrix SpdFactorization::inverse() const {
  Matrix inv = solve(Matrix::Identity(order(), order()));
  return 0.5 * (inv + inv.transpose());
}

PrecisionMatrix::PrecisionMatrix(const Matrix& entries)
    : m_(symmetric_part(entries, "precision matrix")) {
  if (m_.rows() < 2) {
    throw Error(ErrorCode::InvalidParameters, "precision matrix order must be at least 2");
  }
  factorize_matrix(m_);
}

CovarianceMatrix::CovarianceMatrix(const Matrix& entries)
    : m_(symmetric_part(entries, "covariance matrix")) {
  if (m_.rows() < 1) {
    throw Error(ErrorCode::InvalidParameters, "covariance matrix must be nonempty");
  }
}

EdgeSet::EdgeSet(int p) : p_(p) {
  if (p < 1) throw Error(ErrorCode::InvalidParameters, "vertex count must be positive");
}

EdgeSet::EdgeSet(int p, std::span<const Edge> edges) : EdgeSet(p) {
  for (const Edge& e : edges) insert(e);
}

EdgeSet EdgeSet::complete(int p) {
  EdgeSet g(p);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) g.edges_.emplace_back(i, j);
  return g;
}

void EdgeSet::check(const Edge& e) const {
  if (e.i == e.j) throw Error(ErrorCode::SameVertex, "self-loops are not edges");
  if (e.i < 0 || e.j >= p_) {
    throw Error(ErrorCode::IndexOutOfRange,
                "edge (" + std::to_string(e.i) + "," + std::to_string(e.j) + ") outside p=" +
                    std::to_string(p_));
  }
}

bool EdgeSet::contains(int i, int j) const {
  if (i == j) return false;
  return std::binary_search(edges_.begin(), edges_.end(), Edge(i, j));
}

void EdgeSet::insert(const Edge& e) {
  check(e);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
  if (it == edges_.end() || *it != e) edges_.insert(it, e);
}

void EdgeSet::erase(const Edge& e) {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
  if (it != edges_.end() && *it == e) edges_.erase(it);
}

EdgeSet EdgeSet::minus(const EdgeSet& other) const {
  EdgeSet out(p_);
  std::set_difference(edges_.begin(), edges_.end(), other.edges_.begin(), other.edges_.end(),
                      std::back_inserter(out.edges_));
  return out;
}

bool EdgeSet::is_subset_of(const EdgeSet& other) const {
  return std::includes(other.edges_.begin(), other.edges_.end(), edges_.begin(), edges_.end());
}

Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> EdgeSet::support_mask() const {
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(p_, p_, false);
  for (int k = 0; k < p_; ++k) mask(k, k) = true;
  for (const Edge& e : edges_) {
    mask(e.i, e.j) = true;
    mask(e.j, e.i) = true;
  }
  return mask;
}

std::size_t hamming_distance(const EdgeSet& a, const EdgeSet& b) {
  return a.minus(b).size() + b.minus(a).size();
}

MatrixClassSpec MatrixClassSpec::omega_inf(double alpha, double h) {
  if (!(alpha > 0.0) || !(h > 0.0) || !(alpha < h)) {
    throw Error(ErrorCode::InvalidParameters, "omega_inf requires 0 < alpha < h");
  }
  return MatrixClassSpec(OmegaInf{alpha, h});
}

MatrixClassSpec MatrixClassSpec::omega_f(double gamma) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidParameters, "omega_f requires gamma > 0");
  return MatrixClassSpec(OmegaF{gamma});
}

SpdFactorization factorize(const PrecisionMatrix& m) { return factorize_matrix(m.matrix()); }
SpdFactorization factorize(const CovarianceMatrix& m) { return factorize_matrix(m.matrix()); }

CovarianceMatrix invert(const PrecisionMatrix& m) {
  return CovarianceMatrix(factorize(m).inverse());
}

PrecisionMatrix invert(const CovarianceMatrix& m) {
  return PrecisionMatrix(factorize(m).inverse());
}

Matrix submatrix(const Matrix& m, std::span<const int> rows, std::span<const int> cols) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = m(rows[r], cols[c]);
  return out;
}

std::vector<int> complement_of(std::span<const int> indices, int p) {
  std::vector<bool> taken(static_cast<std::size_t>(p), false);
  for (int k : indices) {
    if (k < 0 || k >= p) throw Error(ErrorCode::IndexOutOfRange, "index outside matrix");
    taken[static_cast<std::size_t>(k)] = true;
  }
  std::vector<int> rest;
  for (int k = 0; k < p; ++k)
    if (!taken[static_cast<std::size_t>(k)]) rest.push_back(k);
  return rest;
}

CovarianceMatrix schur_complement(const CovarianceMatrix& m, std::span<const int> keep) {
  const int p = static_cast<int>(m.order());
  if (keep.empty()) throw Error(ErrorCode::EmptyIndexSet, "keep set is empty");
  std::vector<int> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::IndexOverlap, "keep set has duplicate indices");
  }
  const std::vector<int> rest = complement_of(keep, p);
  if (rest.empty()) {
    throw Error(ErrorCode::EmptyIndexSet, "keep set must be a proper subset of the indices");
  }
  const Matrix a = submatrix(m.matrix(), keep, keep);
  const Matrix b = submatrix(m.matrix(), keep, rest);
  const Matrix d = submatrix(m.matrix(), rest, rest);
  const SpdFactorization d_fac = factorize_matrix(d);
  return CovarianceMatrix(a - b * d_fac.solve(b.transpose()));
}

EdgeSet edge_set_of(const PrecisionMatrix& theta, double zero_tol) {
  if (!(zero_tol >= 0.0)) throw Error(ErrorCode::InvalidParameters, "zero_tol must be >= 0");
  const int p = static_cast<int>(theta.order());
  EdgeSet g(p);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (std::abs(theta(i, j)) > zero_tol) g.insert(Edge(i, j));
  return g;
}

bool class_membership(const PrecisionMatrix& theta, const MatrixClassSpec& spec, double zero_tol) {
  const Matrix& m = theta.matrix();
  if (const auto* inf = std::get_if<OmegaInf>(&spec.variant())) {
    const Eigen::Index p = m.rows();
    for (Eigen::Index i = 0; i < p; ++i) {
      if (m(i, i) > inf->h) return false;
      for (Eigen::Index j = i + 1; j < p; ++j) {
        const double a = std::abs(m(i, j));
        if (a > zero_tol && a < inf->alpha) return false;
      }
    }
    return true;
  }
  const auto& f = std::get<OmegaF>(spec.variant());
  return m.norm() <= f.gamma;
}

PrecisionMatrix precision_from_edges(const EdgeSet& g, double diagonal, double off_diagonal) {
  const int p = g.vertex_count();
  Matrix m = Matrix::Identity(p, p) * diagonal;
  for (const Edge& e : g.edges()) {
    m(e.i, e.j) = off_diagonal;
    m(e.j, e.i) = off_diagonal;
  }
  return PrecisionMatrix(m);
}

double condition_number(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  const Vector& ev = es.eigenvalues();
  const double lo = ev.cwiseAbs().minCoeff();
  const double hi = ev.cwiseAbs().maxCoeff();
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

}  // namespace ggsep
