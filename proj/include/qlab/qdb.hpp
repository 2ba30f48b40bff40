#pragma once

#include <array>
#include <vector>

#include "qlab/core.hpp"
#include "qlab/gibbs.hpp"
#include "qlab/lindblad.hpp"

namespace qlab {

/// Gibbs eigenvalues in the eigenbasis of rho_tau (the index is the level).
struct SpectrumSpec {
  Index dim;
  RealVector rho_s;  // strictly positive, sums to 1

  explicit SpectrumSpec(RealVector rho);
  static SpectrumSpec from_gibbs(const GibbsState& g) { return SpectrumSpec(g.spectrum()); }
};

struct ConditionAReport {
  bool holds;
  std::vector<std::array<int, 4>> violations;  // (r, r', s, s') with colliding ratios
};

/// Condition (A): all off-diagonal ratios rho_r/rho_r' distinct.
ConditionAReport check_condition_A(const SpectrumSpec& spec, double rel_tol = 1e-9);

/// Bohr frequencies omega_{rr'} = log(rho_r/rho_r') with the injective
/// signed labeling q: distinct positive frequencies sorted ascending get
/// 1,2,3,...; q(-w) = -q(w), q(0) = 0.
struct BohrTable {
  RealMatrix omega;       // antisymmetric
  Eigen::MatrixXi label;  // q(omega_{rr'})
  int positive_count;     // number of distinct positive frequencies

  static BohrTable build(const SpectrumSpec& spec, double rel_tol = 1e-9);
};

/// A^{(j)}_{rr'} = f_{q(omega_{rr'})}(j) with the concrete l^2 basis
/// f_0 = e_1, f_k = (e_{2k} + i e_{2k+1})/sqrt(2), f_{-k} = conj(f_k).
/// Requires m >= 2*positive_count + 1.
std::vector<Matrix> build_A_tensors(const BohrTable& bohr, int m);

/// K matrix from the free upper triangle (entries with r <= r', diagonal
/// included); the lower triangle is derived so that the cocycle
/// K_{rr'} rho_r = K_{r'r} rho_r' holds identically.
RealMatrix build_K(const SpectrumSpec& spec, const RealMatrix& upper);

struct QdbJumpFamily {
  RealMatrix K;
  std::vector<Matrix> A_tensors;
  JumpOperatorSet jumps;  // W_j with (W_j)_{r'r} = sqrt(K_{rr'}) A^{(j)}_{rr'}
};

/// Constructive synthesis of a jump family satisfying QDB exactly, in the
/// basis where the reference state is diagonal with spectrum spec.rho_s.
QdbJumpFamily synthesize(const SpectrumSpec& spec, const RealMatrix& upper, int m);

/// Same, rotated into the original basis of the Gibbs state.
QdbJumpFamily synthesize(const GibbsState& g, const RealMatrix& upper, int m);

struct QdbReport {
  double residual;           // max_ab ||G(E_ab rho) - (G' E_ab) rho||_F
  double symmetry_residual;  // max |<A,G'B>_tau - <G'A,B>_tau| over random pairs
  double scale;
  bool pass;
};

/// Checks G(A rho) = (G'A) rho over all matrix units, plus the equivalent
/// symmetry of G' in the rho-weighted inner product.
QdbReport verify_qdb(const DensityMatrix& rho_ref, const GeneratorPair& gens, double tol = 1e-9);

/// K_{rr',ss'} = Tr(P_sr Phi'(P_r's')) and C_{rr',ss'} = Tr(P_sr G'(P_r's'))
/// in the rho_tau eigenbasis, stored with composite row (r,r') -> r*d+r'
/// and column (s,s') -> s*d+s'.
struct CoefficientTables {
  Matrix K4;
  Matrix C4;
  double lemma_c_residual;    // C = K - 1/2 delta delta sum(K_rl + K_sl) (pattern families)
  double off_pattern_max;     // max |K4| outside the QDB index pattern
  double balance_residual;    // max |C_{rr',ss'} rho_s - C_{s's,r'r} rho_s'|
};

CoefficientTables coefficient_tables(const GeneratorPair& gens, const GibbsState& gibbs);

struct ModularAverageResult {
  SuperOperator phi_avg;         // Phi'_infty, observable side
  std::vector<Matrix> W_tilde;   // Kraus family of the averaged map
  double Y_commutator_residual;  // ||[sum W~*W~, rho]||_F / ||..||
  double projection_distance;    // ||Phi'_infty - Phi'||_F / max(1, ||Phi'||_F)
};

/// Modular averaging of Phi': keeps only the matrix elements connecting
/// equal Bohr frequencies; the result is the T->infty mean of
/// alpha_t Phi' alpha_{-t}.
ModularAverageResult modular_average(const GeneratorPair& gens, const GibbsState& gibbs,
                                     double freq_rel_tol = 1e-9);

}  // namespace qlab
