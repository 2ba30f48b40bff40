#pragma once

#include <random>

#include "qlab/core.hpp"
#include "qlab/gibbs.hpp"
#include "qlab/lindblad.hpp"

namespace qlab::test {

inline Matrix random_matrix(std::mt19937_64& rng, Index d) {
  std::normal_distribution<double> nd;
  Matrix m(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) m(i, j) = Complex(nd(rng), nd(rng));
  return m;
}

inline Matrix random_hermitian(std::mt19937_64& rng, Index d) {
  Matrix m = random_matrix(rng, d);
  return (m + m.adjoint()) / 2.0;
}

inline Matrix random_psd(std::mt19937_64& rng, Index d) {
  Matrix m = random_matrix(rng, d);
  return m * m.adjoint();
}

inline Matrix random_density(std::mt19937_64& rng, Index d) {
  Matrix p = random_psd(rng, d);
  return p / p.trace().real();
}

/// Singular values through the eigenvalues of M*M; independent of the
/// SVD route used by schatten_norm.
inline RealVector singular_values_oracle(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.adjoint() * m);
  RealVector s(es.eigenvalues().size());
  for (Index k = 0; k < s.size(); ++k) s[k] = std::sqrt(std::max(0.0, es.eigenvalues()[k]));
  return s;
}

inline GibbsState qubit_gibbs(double tau = 1.0) {
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = 1.0;
  return make_gibbs(HermitianOperator(h), tau);
}

inline JumpOperatorSet thermal_qubit_jumps(const GibbsState& g, double gamma_down) {
  double gamma_up = gamma_down * g.spectrum()[1] / g.spectrum()[0];
  Matrix lower = Matrix::Zero(2, 2), raise = Matrix::Zero(2, 2);
  lower(0, 1) = std::sqrt(gamma_down);
  raise(1, 0) = std::sqrt(gamma_up);
  return JumpOperatorSet({lower, raise});
}

inline Matrix sigma_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Matrix sigma_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline Matrix sigma_minus() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

}  // namespace qlab::test
