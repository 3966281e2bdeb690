#include <doctest.h>

#include <cmath>
#include <random>

#include "ggsep/core.hpp"
#include "ggsep/simulation.hpp"
#include "oracles.hpp"

using namespace ggsep;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

double rel_err(const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

}  // namespace

TEST_CASE("factorize: identity, diagonal and 2x2 determinants") {
  const SpdFactorization id = factorize(PrecisionMatrix(Matrix::Identity(3, 3)));
  CHECK(id.log_determinant() == doctest::Approx(0.0));
  CHECK((id.factor() - Matrix::Identity(3, 3)).norm() == doctest::Approx(0.0));

  CHECK(factorize(PrecisionMatrix(mat2(2, 0, 0, 2))).log_determinant() ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-14));
  // det [[2,1],[1,2]] = 4 - 1 = 3
  CHECK(factorize(PrecisionMatrix(mat2(2, 1, 1, 2))).log_determinant() ==
        doctest::Approx(std::log(3.0)).epsilon(1e-14));
}

TEST_CASE("factorize: reconstruction and log-determinant on random SPD matrices") {
  std::mt19937_64 rng(11);
  for (int p : {2, 3, 7, 20, 50}) {
    const Matrix m = oracle::random_spd(p, rng);
    const SpdFactorization f = factorize_matrix(m);
    const Matrix& l = f.factor();
    CHECK(rel_err(l * l.transpose(), m) < 1e-12);
    CHECK(l.isLowerTriangular());
    CHECK(f.log_determinant() == doctest::Approx(2.0 * l.diagonal().array().log().sum()));
    CHECK(f.log_determinant() == doctest::Approx(oracle::log_det(m)).epsilon(1e-10));
  }
}

TEST_CASE("factorize: failures are errors") {
  CHECK_THROWS_AS(factorize_matrix(mat2(1, 2, 2, 1)), Error);
  try {
    factorize_matrix(mat2(1, 2, 2, 1));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPositiveDefinite);
    CHECK(e.category() == ErrorCategory::MathDomain);
  }
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(factorize_matrix(bad), Error);
  CHECK_THROWS_AS(PrecisionMatrix(mat2(0, 0, 0, 1)), Error);
}

TEST_CASE("PrecisionMatrix construction invariants") {
  Matrix m = mat2(2, 1, 1 + 1e-15, 2);
  const PrecisionMatrix t(m);
  CHECK(t(0, 1) == t(1, 0));

  try {
    PrecisionMatrix bad(mat2(2, 1, 0.5, 2));
    FAIL("expected NotSymmetric");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotSymmetric);
  }
  try {
    PrecisionMatrix one(Matrix::Identity(1, 1));
    FAIL("expected InvalidParameters");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidParameters);
  }
  // singular covariances are allowed, only symmetry is enforced
  CHECK_NOTHROW(CovarianceMatrix(Matrix::Zero(3, 3)));
}

TEST_CASE("invert: examples") {
  CHECK(rel_err(invert(PrecisionMatrix(Matrix::Identity(4, 4))).matrix(), Matrix::Identity(4, 4)) < 1e-15);
  CHECK(rel_err(invert(PrecisionMatrix(mat2(2, 0, 0, 4))).matrix(), mat2(0.5, 0, 0, 0.25)) < 1e-15);
  // 2x2 inverse: 1/(1 - 0.25) [[1, 0.5], [0.5, 1]]
  const Matrix expected = (4.0 / 3.0) * mat2(1, 0.5, 0.5, 1);
  CHECK(rel_err(invert(PrecisionMatrix(mat2(1, -0.5, -0.5, 1))).matrix(), expected) < 1e-14);
  CHECK_THROWS_AS(invert(CovarianceMatrix(mat2(1, 2, 2, 1))), Error);
}

TEST_CASE("invert: involution, identity product and log-determinant sign") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const int p = 2 + static_cast<int>(rng() % 49);
    const PrecisionMatrix theta(oracle::random_spd(p, rng));
    const CovarianceMatrix sigma = invert(theta);
    CHECK(rel_err(theta.matrix() * sigma.matrix(), Matrix::Identity(p, p)) < 1e-10);
    CHECK(rel_err(invert(sigma).matrix(), theta.matrix()) < 1e-9);
    CHECK(std::abs(factorize(sigma).log_determinant() + factorize(theta).log_determinant()) < 1e-9);
  }
}

TEST_CASE("schur_complement: examples") {
  Matrix block = Matrix::Zero(4, 4);
  block.topLeftCorner(2, 2) = mat2(3, 1, 1, 2);
  block.bottomRightCorner(2, 2) = mat2(5, -1, -1, 4);
  const std::vector<int> keep{0, 1};
  CHECK(rel_err(schur_complement(CovarianceMatrix(block), keep).matrix(), mat2(3, 1, 1, 2)) < 1e-15);

  // 2 - 1 * (1/2) * 1
  const std::vector<int> first{0};
  CHECK(schur_complement(CovarianceMatrix(mat2(2, 1, 1, 2)), first)(0, 0) == doctest::Approx(1.5));
}

TEST_CASE("schur_complement: determinant identity against elimination oracle") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix m = oracle::random_spd(5, rng);
    std::vector<int> keep, rest;
    for (int k = 0; k < 5; ++k) (rng() % 2 ? keep : rest).push_back(k);
    if (keep.empty() || rest.empty()) continue;
    const CovarianceMatrix s = schur_complement(CovarianceMatrix(m), keep);
    CHECK(s.order() == static_cast<Eigen::Index>(keep.size()));
    CHECK(s.matrix() == s.matrix().transpose());
    const double lhs = oracle::determinant(s.matrix());
    const double rhs = oracle::determinant(m) / oracle::determinant(oracle::select(m, rest, rest));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("schur_complement: errors") {
  const CovarianceMatrix m(Matrix::Identity(3, 3));
  const std::vector<int> none;
  const std::vector<int> all{0, 1, 2};
  const std::vector<int> dup{0, 0};
  CHECK_THROWS_AS(schur_complement(m, none), Error);
  CHECK_THROWS_AS(schur_complement(m, all), Error);
  CHECK_THROWS_AS(schur_complement(m, dup), Error);
  const std::vector<int> first{0};
  try {
    schur_complement(CovarianceMatrix(mat2(1, 0, 0, -1)), first);
    FAIL("expected NotPositiveDefinite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPositiveDefinite);
  }
}

TEST_CASE("edge_set_of: examples") {
  CHECK(edge_set_of(PrecisionMatrix(Matrix::Identity(4, 4) * 3.0)).empty());

  const EdgeSet g = edge_set_of(counterexample_precision(2));
  CHECK(g == EdgeSet::complete(3));

  Matrix m(3, 3);
  m << 2, 1e-15, 0, 1e-15, 2, 1, 0, 1, 2;
  const EdgeSet h = edge_set_of(PrecisionMatrix(m), 1e-12);
  CHECK(h.size() == 1);
  CHECK(h.contains(1, 2));
  CHECK_THROWS_AS(edge_set_of(PrecisionMatrix(m), -1.0), Error);
}

TEST_CASE("edge_set_of round-trips edge sets written into a precision matrix") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const int p = 2 + static_cast<int>(rng() % 10);
    EdgeSet g(p);
    for (int i = 0; i < p; ++i)
      for (int j = i + 1; j < p; ++j)
        if (rng() % 3 == 0) g.insert(Edge(i, j));
    // diagonal p keeps the matrix dominant for off-diagonal magnitude 0.5
    const PrecisionMatrix theta = precision_from_edges(g, static_cast<double>(p), 0.5);
    CHECK(edge_set_of(theta, 0.0) == g);
  }
}

TEST_CASE("EdgeSet invariants and Hamming distance") {
  EdgeSet g(4);
  g.insert(Edge(2, 1));
  g.insert(Edge(1, 2));
  CHECK(g.size() == 1);
  CHECK(g.edges().front().i == 1);
  CHECK_THROWS_AS(g.insert(Edge(3, 3)), Error);
  CHECK_THROWS_AS(g.insert(Edge(0, 4)), Error);

  const EdgeSet k = EdgeSet::complete(4);
  CHECK(k.size() == 6);
  CHECK(g.is_subset_of(k));
  CHECK_FALSE(k.is_subset_of(g));
  CHECK(hamming_distance(g, k) == 5);
  CHECK(k.minus(g).size() == 5);
}

TEST_CASE("class_membership: examples") {
  CHECK(class_membership(PrecisionMatrix(Matrix::Identity(4, 4)), MatrixClassSpec::omega_f(2.0)));
  CHECK_FALSE(class_membership(PrecisionMatrix(Matrix::Identity(4, 4)), MatrixClassSpec::omega_f(1.999)));

  const PrecisionMatrix t(mat2(2, 1, 1, 2));
  CHECK(class_membership(t, MatrixClassSpec::omega_inf(1.0, 2.0)));
  CHECK_FALSE(class_membership(t, MatrixClassSpec::omega_inf(1.5, 2.0)));
  CHECK_FALSE(class_membership(t, MatrixClassSpec::omega_inf(0.5, 1.9)));

  CHECK(class_membership(counterexample_precision(2), MatrixClassSpec::omega_inf(1.0, 2.0)));

  CHECK_THROWS_AS(MatrixClassSpec::omega_inf(2.0, 2.0), Error);
  CHECK_THROWS_AS(MatrixClassSpec::omega_inf(0.0, 2.0), Error);
  CHECK_THROWS_AS(MatrixClassSpec::omega_f(0.0), Error);
}
