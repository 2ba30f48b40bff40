#include "qlab/modular.hpp"

#include <cmath>
#include <random>

namespace qlab {

namespace {
const Complex kI(0.0, 1.0);
}

Vector modular_conjugation(const Vector& kappa_vec) {
  return vec(unvec(kappa_vec).adjoint());
}

ModularData build_modular(const GibbsState& gibbs) {
  const Index d = gibbs.dim();
  ModularData mod;
  mod.dim = d;
  mod.omega_matrix = gibbs.rho_power(0.5);
  mod.omega_inverse = gibbs.rho_power(-0.5);
  mod.omega = vec(mod.omega_matrix);

  Matrix h_tau = -gibbs.log_rho().matrix();
  const Matrix id = Matrix::Identity(d, d);
  mod.L_tau = SuperOperator{d, kron(id, h_tau) - kron(h_tau.transpose(), id)};

  // covariance: vec(alpha_t(A)) = e^{i L_tau t} vec(A) on sampled A
  std::mt19937_64 rng(0x1c0ffee1u);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (double t : {0.5, 1.0}) {
    Matrix u = expm(kI * t * mod.L_tau.mat);
    Matrix phase = expm(Matrix(kI * t * h_tau));
    for (int trial = 0; trial < 10; ++trial) {
      Matrix A(d, d);
      for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) A(i, j) = Complex(nd(rng), nd(rng));
      Matrix alpha = phase * A * phase.adjoint();
      double res = (vec(alpha) - u * vec(A)).norm() / std::max(1.0, A.norm());
      worst = std::max(worst, res);
    }
  }
  mod.covariance_residual = worst;
  return mod;
}

double check_S_operator(const ModularData& mod, const Matrix& A) {
  if (A.rows() != mod.dim || A.cols() != mod.dim)
    throw ShapeError("check_S_operator: dimension mismatch");
  Matrix half = expm(Matrix(-0.5 * mod.L_tau.mat));
  Vector lhs = modular_conjugation(Vector(half * vec(Matrix(A * mod.omega_matrix))));
  Vector rhs = vec(Matrix(A.adjoint() * mod.omega_matrix));
  return (lhs - rhs).norm() / std::max(1.0, rhs.norm());
}

ModularCommutationReport check_modular_commutation(const ModularData& mod,
                                                   const GeneratorPair& gens,
                                                   const GibbsState& gibbs) {
  const Index d = mod.dim;
  if (gens.dim() != d) throw ShapeError("check_modular_commutation: dimension mismatch");
  (void)gibbs;

  // right multiplication by Omega and its inverse (rho_tau > 0)
  const Matrix id = Matrix::Identity(d, d);
  Matrix r_omega = kron(mod.omega_matrix.transpose(), id);
  Matrix r_omega_inv = kron(mod.omega_inverse.transpose(), id);
  Matrix g_hat = r_omega * gens.Gp.mat * r_omega_inv;

  Matrix e_mod = expm(Matrix(-mod.L_tau.mat));
  double comm = (g_hat * e_mod - e_mod * g_hat).norm() /
                std::max(1.0, g_hat.norm() * e_mod.norm());
  double sa = (g_hat - g_hat.adjoint()).norm() / std::max(1.0, g_hat.norm());

  // S = J e^{-L_tau/2} is antilinear; test the commutation on basis vectors
  Matrix half = expm(Matrix(-0.5 * mod.L_tau.mat));
  double s_comm = 0.0;
  for (Index k = 0; k < d * d; ++k) {
    Vector e = Vector::Zero(d * d);
    e[k] = 1.0;
    Vector lhs = modular_conjugation(Vector(half * (g_hat * e)));
    Vector rhs = g_hat * modular_conjugation(Vector(half * e));
    s_comm = std::max(s_comm, (lhs - rhs).norm() / std::max(1.0, g_hat.norm()));
  }

  return ModularCommutationReport{comm, sa, s_comm, sa <= 1e-6};
}

}  // namespace qlab
