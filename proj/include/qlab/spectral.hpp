#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qlab/core.hpp"
#include "qlab/dynamics.hpp"
#include "qlab/gibbs.hpp"
#include "qlab/lindblad.hpp"

namespace qlab {

/// Adjoint w.r.t. the metric's inner product: M^{-1} S* M for Gram M.
SuperOperator weighted_adjoint(const SuperOperator& S, const WeightedMetric& metric);

/// Metric-orthonormal basis of the kernel of S (columns, vec space), with
/// the kernel decided by SVD of the symmetrized representative
/// M^{1/2} S M^{-1/2} at relative threshold 1e-10.
struct KernelResult {
  Matrix basis;  // d^2 x k, metric-orthonormal
  int dim;
  bool rank_ambiguous;  // a singular value fell in [1e-11, 1e-9] * sigma_max
};
KernelResult metric_kernel(const SuperOperator& S, const WeightedMetric& metric);

/// Metric-orthogonal projection of vec-space vectors onto the kernel span.
Matrix metric_projector(const KernelResult& kernel, const WeightedMetric& metric);

struct StructureReport {
  double gp_self_adjoint;     // (a) G' in <.,.>_tau
  double gp_max_eigenvalue;   // (b) symmetrized G' <= 0
  double l0p_anti;            // (c) L0' anti-self-adjoint in <.,.>_tau
  double g_self_adjoint;      // (d) G in <.,.>_{st,tau}
  double g_max_eigenvalue;    // (d) G <= 0
  double commutation;         // (e) ||e^{L0 t} G - G e^{L0 t}|| at t in {0.3, 1, pi}
  double gp_tau1_symmetric;   // (f) G' symmetric in <.,.>_{tau,1}
  std::vector<std::string> violations;  // items with residual > 1e-6
  bool passed;                          // all residuals within their spec tolerances
};

StructureReport structure_check(const GeneratorPair& gens, const GibbsState& gibbs);

/// Throws StructureViolation naming the first failed item.
void require_structure(const StructureReport& report);

struct NullSpacesReport {
  KernelResult null_L, null_G, null_L0;  // in the st,tau metric
  double intersection_residual;  // || P_L - P_G P_L0 P_G ... || via mutual inclusion
  double rho_tau_residual;       // ||L(rho_tau)|| / scale
  bool rank_ambiguous;
};

NullSpacesReport null_spaces(const GeneratorPair& gens, const GibbsState& gibbs);

struct CommutantReport {
  int dim;
  std::vector<Matrix> basis;
  double worst_residual;
};

/// {X : [W_j, X] = [W_j*, X] = 0 for all j} via the stacked Kronecker system.
CommutantReport commutant(const JumpOperatorSet& jumps, Index dim_hint = 0);

struct SpectralReport {
  Vector L_eigenvalues;            // of L (plain matrix)
  RealVector gp_sym_eigenvalues;   // of the metric-symmetrized G' (ascending)
  double gap_theta;                // dist(0, spec(G') \ {0})
  int null_dim;                    // of G' at the 1e-10 relative threshold
  Matrix null_basis;               // metric-orthonormal kernel of G'
  double self_adjointness_residual;
  double negativity_slack;         // max eigenvalue of symmetrized G'
  double max_imag_residue;         // Hermiticity defect of the symmetrized G'
};

SpectralReport spectral_report(const GeneratorPair& gens, const GibbsState& gibbs);

struct ErgodicRow {
  double T;
  double err_state, bound_state;  // S_tau
  double err_tau1, bound_tau1;    // B_{tau,1}
  double err_tau, bound_tau;      // B_tau
};

struct ErgodicTable {
  std::vector<ErgodicRow> rows;
  double tail_ratio_state, tail_ratio_tau1, tail_ratio_tau;  // err(last)/err(first-of-pair)
  double halving_ratio;  // max over metrics of err(T_n)/err(T_{n-1}) on the largest doubling pair
  bool bounds_hold;
  bool halving_ok;  // err(2T) <= 0.75 err(T) on the largest pair (vacuous without one)
};

/// Ergodic averages against the metric projections onto the stationary
/// spaces, with the 2/T envelope, in all three metrics.
ErgodicTable ergodic_limit_check(const GeneratorPair& gens, const GibbsState& gibbs,
                                 const Matrix& rho0, const Matrix& A0,
                                 const std::vector<double>& T_list);

struct DecayRow {
  double t;
  double err_state, err_dual, err_state_T;  // st,tau | tau | st,tau transpose
  double envelope;                          // e^{-theta t} (unit initial norm)
};

struct DecayTable {
  bool hypothesis_met;  // Condition (Null): Null(G) inside Null(L0)
  std::string status;
  double theta;
  bool zero_simple;
  std::vector<DecayRow> rows;
  double fitted_prefactor;  // max err * e^{theta t} / ||x0||, full L' flow
  std::string spectral_note;
  bool bounds_hold;
};

/// Gap-driven exponential decay bounds in the three norms. The decay
/// assertions are skipped with hypothesis-not-met status when Condition
/// (Null) fails or G vanishes.
DecayTable gap_decay_check(const GeneratorPair& gens, const GibbsState& gibbs,
                           const std::vector<double>& samples_over_theta, const Matrix& rho0,
                           const Matrix& A0);

}  // namespace qlab
