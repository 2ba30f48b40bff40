#pragma once

#include "qlab/core.hpp"
#include "qlab/gibbs.hpp"
#include "qlab/lindblad.hpp"

namespace qlab {

/// GNS/modular data on the Hilbert-Schmidt space: cyclic vector
/// Omega_tau = rho_tau^{1/2}, modular generator L_tau = I (x) H_tau -
/// H_tau^T (x) I with H_tau = -ln rho_tau, and the antilinear
/// conjugation J : kappa -> kappa*. J has no complex-matrix
/// representation; it is applied through modular_conjugation with the
/// conjugation written out at each call site.
struct ModularData {
  Index dim;
  Vector omega;          // vec(rho_tau^{1/2})
  SuperOperator L_tau;   // Hermitian in the HS inner product
  Matrix omega_matrix;   // rho_tau^{1/2}
  Matrix omega_inverse;  // rho_tau^{-1/2}
  double covariance_residual;  // vec(alpha_t(A)) vs e^{i L_tau t} vec(A), sampled
};

/// J kappa = kappa*, on vec coordinates: conjugate then transpose-permute.
Vector modular_conjugation(const Vector& kappa_vec);

ModularData build_modular(const GibbsState& gibbs);

/// || J e^{-L_tau/2} vec(A Omega) - vec(A* Omega) ||, relative.
double check_S_operator(const ModularData& mod, const Matrix& A);

struct ModularCommutationReport {
  double commutation_residual;    // (i)  [G'^, e^{-L_tau}]
  double self_adjoint_residual;   // (ii) G'^ Hermitian on S_2
  double s_commutation_residual;  // (iii) [G'^, S], S antilinear
  bool qdb_consistent;            // (ii) within 1e-6
};

/// G'^ = R_Omega G' R_Omega^{-1} with R_Omega right-multiplication by
/// Omega_tau; under QDB, G'^ is Hermitian and commutes with e^{-L_tau}.
ModularCommutationReport check_modular_commutation(const ModularData& mod,
                                                   const GeneratorPair& gens,
                                                   const GibbsState& gibbs);

}  // namespace qlab
