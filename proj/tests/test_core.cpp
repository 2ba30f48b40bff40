#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "qlab/core.hpp"

using namespace qlab;
using namespace qlab::test;

TEST_CASE("schatten norms of explicit matrices") {
  Matrix I2 = Matrix::Identity(2, 2);
  CHECK(schatten_norm(I2, 1.0) == doctest::Approx(2.0).epsilon(1e-12));

  Matrix d(2, 2);
  d << 3, 0, 0, -4;
  CHECK(schatten_norm(d, 1.0) == doctest::Approx(7.0).epsilon(1e-12));
  CHECK(schatten_norm(d, 2.0) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(schatten_norm(d, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(4.0).epsilon(1e-12));

  CHECK_THROWS_AS(schatten_norm(I2, 0.5), InvalidParameter);
}

TEST_CASE("schatten norm against the eigenvalue-route SVD oracle") {
  std::mt19937_64 rng(11);
  Matrix m = random_matrix(rng, 4);
  RealVector s = singular_values_oracle(m);
  for (double p : {1.0, 2.0, 3.5}) {
    double expected = 0.0;
    for (Index k = 0; k < s.size(); ++k) expected += std::pow(s[k], p);
    expected = std::pow(expected, 1.0 / p);
    CHECK(std::abs(schatten_norm(m, p) - expected) <= 1e-10 * std::max(1.0, expected));
  }
  CHECK(std::abs(schatten_norm(m, std::numeric_limits<double>::infinity()) - s.maxCoeff()) <=
        1e-10);
}

TEST_CASE("schatten norm properties on Hermitian inputs") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix m = random_hermitian(rng, 3);
    CHECK(schatten_norm(m, 1.0) >= std::abs(m.trace().real()) - 1e-10);
    CHECK(std::abs(std::pow(schatten_norm(m, 2.0), 2) - (m.adjoint() * m).trace().real()) <=
          1e-10 * std::max(1.0, m.squaredNorm()));
  }
}

TEST_CASE("hermitian_function basics") {
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = 1.0;
  HermitianOperator H(h);
  Matrix e = H.apply([](double x) { return std::exp(x); });
  CHECK(e(0, 0).real() == doctest::Approx(1.0));
  CHECK(e(1, 1).real() == doctest::Approx(std::exp(1.0)));
  CHECK(std::abs(e(0, 1)) <= 1e-14);

  std::mt19937_64 rng(13);
  Matrix p = random_psd(rng, 3);
  HermitianOperator P(p);
  Matrix r = P.apply([](double x) { return std::sqrt(x); });
  Matrix back = r * r;
  CHECK((back - p).norm() <= 1e-10 * std::max(1.0, p.norm()));

  // log then exp round-trip
  Matrix pp = p + 0.1 * Matrix::Identity(3, 3);
  HermitianOperator PP(pp);
  HermitianOperator lg(PP.apply([](double x) { return std::log(x); }));
  Matrix again = lg.apply([](double x) { return std::exp(x); });
  CHECK((again - pp).norm() <= 1e-9 * std::max(1.0, pp.norm()));

  // identity function returns the matrix
  CHECK((PP.apply([](double x) { return x; }) - pp).norm() <= 1e-10 * pp.norm());
}

TEST_CASE("hermitian_function domain error names the eigenvalue") {
  Matrix z = Matrix::Zero(2, 2);
  HermitianOperator Z(z);
  CHECK_THROWS_AS(Z.apply([](double x) { return std::log(x); }), DomainError);
}

TEST_CASE("eigendecomposition reconstructs the operator") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix m = random_hermitian(rng, 5);
    HermitianOperator H(m);
    Matrix back = H.eigenvectors() * H.eigenvalues().asDiagonal() * H.eigenvectors().adjoint();
    CHECK((back - m).norm() <= 1e-10 * std::max(1.0, m.norm()));
    Matrix uu = H.eigenvectors().adjoint() * H.eigenvectors();
    CHECK((uu - Matrix::Identity(5, 5)).norm() <= 1e-12);
  }
}

TEST_CASE("hermiticity is rejected, not repaired") {
  Matrix m(2, 2);
  m << 1.0, Complex(0.0, 1e-6), 0.0, 2.0;
  CHECK_THROWS_AS(HermitianOperator{m}, InvalidParameter);
}

TEST_CASE("density matrix validation") {
  Matrix ok(2, 2);
  ok << 0.75, 0.1, 0.1, 0.25;
  CHECK_NOTHROW(DensityMatrix{ok});

  Matrix bad_trace = 0.9 * ok;
  CHECK_THROWS_AS(DensityMatrix{bad_trace}, InvalidParameter);

  Matrix indefinite(2, 2);
  indefinite << 1.2, 0.0, 0.0, -0.2;
  CHECK_THROWS_AS(DensityMatrix{indefinite}, InvalidParameter);

  Matrix skew(2, 2);
  skew << 0.5, Complex(0.1, 1e-6), Complex(0.1, 1e-6), 0.5;
  CHECK_THROWS_AS(DensityMatrix{skew}, InvalidParameter);
}

TEST_CASE("vec is column stacking and unvec inverts it") {
  Matrix m(2, 2);
  m << Complex(1, 0), Complex(3, 1), Complex(2, 0), Complex(4, -2);
  Vector v = vec(m);
  CHECK(v[0] == Complex(1, 0));
  CHECK(v[1] == Complex(2, 0));
  CHECK(v[2] == Complex(3, 1));
  CHECK(v[3] == Complex(4, -2));

  std::mt19937_64 rng(14);
  Matrix r = random_matrix(rng, 5);
  CHECK((unvec(vec(r)) - r).norm() == 0.0);

  Vector bad(5);
  bad.setZero();
  CHECK_THROWS_AS(unvec(bad), ShapeError);
}

TEST_CASE("vec(AXB) = (B^T kron A) vec(X)") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix a = random_matrix(rng, 3), x = random_matrix(rng, 3), b = random_matrix(rng, 3);
    Vector lhs = vec(Matrix(a * x * b));
    Vector rhs = kron(b.transpose(), a) * vec(x);
    CHECK((lhs - rhs).norm() <= 1e-12 * std::max(1.0, lhs.norm()));
  }
}

TEST_CASE("sandwich superoperator") {
  std::mt19937_64 rng(16);
  Matrix id = Matrix::Identity(3, 3);
  SuperOperator s_id = sandwich_superop(id, id);
  CHECK((s_id.mat - Matrix::Identity(9, 9)).norm() <= 1e-14);

  Matrix a = random_matrix(rng, 4), b = random_matrix(rng, 4), x = random_matrix(rng, 4);
  SuperOperator s = sandwich_superop(a, b);
  CHECK((s.apply(x) - a * x * b).norm() <= 1e-12 * std::max(1.0, x.norm()));

  // composition: sandwich(A,B) sandwich(C,D) = sandwich(AC, DB)
  Matrix c = random_matrix(rng, 4), d = random_matrix(rng, 4);
  SuperOperator lhs{4, Matrix(s.mat * sandwich_superop(c, d).mat)};
  SuperOperator rhs = sandwich_superop(Matrix(a * c), Matrix(d * b));
  CHECK((lhs.mat - rhs.mat).norm() <= 1e-10 * std::max(1.0, rhs.mat.norm()));

  CHECK_THROWS_AS(sandwich_superop(random_matrix(rng, 2), random_matrix(rng, 3)), ShapeError);
}

TEST_CASE("superoperator linearity") {
  std::mt19937_64 rng(17);
  Matrix a = random_matrix(rng, 3), b = random_matrix(rng, 3);
  SuperOperator s = sandwich_superop(a, b);
  Matrix x = random_matrix(rng, 3), y = random_matrix(rng, 3);
  Complex alpha(0.3, -1.2), beta(2.0, 0.7);
  Matrix lhs = s.apply(alpha * x + beta * y);
  Matrix rhs = alpha * s.apply(x) + beta * s.apply(y);
  CHECK((lhs - rhs).norm() <= 1e-12 * std::max(1.0, lhs.norm()));
}

TEST_CASE("expm_phi1 equals the integral of the exponential") {
  std::mt19937_64 rng(18);
  Matrix m = random_matrix(rng, 3);
  m *= 0.5;
  // Simpson on a fine grid as an independent quadrature
  const int n = 400;
  Matrix acc = Matrix::Zero(3, 3);
  for (int k = 0; k <= n; ++k) {
    double s = static_cast<double>(k) / n;
    double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    acc += w * expm(Matrix(s * m));
  }
  acc /= 3.0 * n;
  CHECK((expm_phi1(m) - acc).norm() <= 1e-8 * std::max(1.0, acc.norm()));

  CHECK((expm_phi1(Matrix::Zero(4, 4)) - Matrix::Identity(4, 4)).norm() <= 1e-13);
}
