#pragma once

// Domain types and SPD linear algebra shared by the rest of the library.
//
// All matrices are dense Eigen matrices. PrecisionMatrix guarantees exact
// symmetry and positive definiteness on construction; CovarianceMatrix
// guarantees exact symmetry and finiteness only, because empirical
// covariances from few samples may be singular.

#include <compare>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ggsep/errors.hpp"

namespace ggsep {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kDefaultZeroTol = 1e-12;

/// Lower-triangular Cholesky factor with its cached log-determinant (nats).
class SpdFactorization {
 public:
  const Matrix& factor() const noexcept { return factor_; }
  double log_determinant() const noexcept { return log_det_; }
  Eigen::Index order() const noexcept { return factor_.rows(); }

  /// Solves M x = b for the factored M.
  Matrix solve(const Matrix& rhs) const;
  Matrix inverse() const;

 private:
  friend SpdFactorization factorize_matrix(const Matrix& m);
  SpdFactorization(Matrix factor, double log_det) : factor_(std::move(factor)), log_det_(log_det) {}

  Matrix factor_;
  double log_det_;
};

/// Factorizes a raw symmetric matrix. Throws NotPositiveDefinite when a pivot
/// is non-positive or any entry is non-finite.
SpdFactorization factorize_matrix(const Matrix& m);

/// Inverse covariance of a zero-mean Gaussian. Order p >= 2, exactly
/// symmetric and positive definite.
class PrecisionMatrix {
 public:
  /// Accepts matrices symmetric up to a relative 1e-10; stores the exact
  /// symmetric part.
  explicit PrecisionMatrix(const Matrix& entries);

  Eigen::Index order() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  Matrix m_;
};

/// Covariance of a zero-mean Gaussian (population or empirical). Order
/// p >= 1, exactly symmetric, finite. Positive definiteness is checked by the
/// operations that need it.
class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(const Matrix& entries);

  Eigen::Index order() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  Matrix m_;
};

/// Unordered off-diagonal vertex pair, stored with i < j.
struct Edge {
  int i = 0;
  int j = 0;

  Edge() = default;
  Edge(int a, int b) : i(a < b ? a : b), j(a < b ? b : a) {}

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Undirected graph on vertices {0..p-1}. Never contains self-loops; the
/// diagonal of a precision matrix is always free.
class EdgeSet {
 public:
  explicit EdgeSet(int p);
  EdgeSet(int p, std::span<const Edge> edges);

  static EdgeSet complete(int p);

  int vertex_count() const noexcept { return p_; }
  std::size_t size() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return edges_.empty(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  bool contains(int i, int j) const;
  bool contains(const Edge& e) const { return contains(e.i, e.j); }
  void insert(const Edge& e);
  void erase(const Edge& e);

  /// Edges of this graph absent from `other`.
  EdgeSet minus(const EdgeSet& other) const;
  bool is_subset_of(const EdgeSet& other) const;

  /// Vertex-by-vertex mask with the diagonal set.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> support_mask() const;

  friend bool operator==(const EdgeSet&, const EdgeSet&) = default;

 private:
  void check(const Edge& e) const;

  int p_;
  std::vector<Edge> edges_;  // sorted, unique
};

/// Hamming distance: edges present in exactly one of the two graphs.
std::size_t hamming_distance(const EdgeSet& a, const EdgeSet& b);

struct OmegaInf {
  double alpha;
  double h;
};

struct OmegaF {
  double gamma;
};

/// Ω_∞(α, h): diagonals <= h, nonzero off-diagonals >= α in magnitude.
/// Ω_F(γ): Frobenius norm <= γ.
class MatrixClassSpec {
 public:
  static MatrixClassSpec omega_inf(double alpha, double h);
  static MatrixClassSpec omega_f(double gamma);

  const std::variant<OmegaInf, OmegaF>& variant() const noexcept { return v_; }

 private:
  explicit MatrixClassSpec(std::variant<OmegaInf, OmegaF> v) : v_(v) {}
  std::variant<OmegaInf, OmegaF> v_;
};

SpdFactorization factorize(const PrecisionMatrix& m);
SpdFactorization factorize(const CovarianceMatrix& m);

CovarianceMatrix invert(const PrecisionMatrix& m);
PrecisionMatrix invert(const CovarianceMatrix& m);

/// Schur complement of the block over `keep` against its complement:
/// A - B D^{-1} C. For a covariance this is the conditional covariance of
/// the kept coordinates given the rest.
CovarianceMatrix schur_complement(const CovarianceMatrix& m, std::span<const int> keep);

/// Off-diagonal pairs with |Θ(i,j)| > zero_tol.
EdgeSet edge_set_of(const PrecisionMatrix& theta, double zero_tol = kDefaultZeroTol);

bool class_membership(const PrecisionMatrix& theta, const MatrixClassSpec& spec,
                      double zero_tol = kDefaultZeroTol);

/// Builds a precision matrix with the given diagonal and the same value on
/// every edge of `g`.
PrecisionMatrix precision_from_edges(const EdgeSet& g, double diagonal, double off_diagonal);

/// Ratio of largest to smallest eigenvalue.
double condition_number(const Matrix& m);

// Index helpers for block extraction.
Matrix submatrix(const Matrix& m, std::span<const int> rows, std::span<const int> cols);
std::vector<int> complement_of(std::span<const int> indices, int p);

}  // namespace ggsep
