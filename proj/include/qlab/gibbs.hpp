#pragma once

#include "qlab/core.hpp"

namespace qlab {

enum class Side { State, Observable };

/// Gibbs state rho_tau = e^{-H/tau}/Z with its spectral data. The
/// eigenbasis is shared with H; the spectrum is stored descending so
/// rho_s = e^{-eps_s/tau}/Z with eps ascending.
class GibbsState {
 public:
  GibbsState(HermitianOperator H, double tau);

  double tau() const { return tau_; }
  double partition_function() const { return Z_; }
  Index dim() const { return H_.dim(); }
  const HermitianOperator& hamiltonian() const { return H_; }
  const DensityMatrix& rho() const { return rho_; }
  const HermitianOperator& log_rho() const { return log_rho_; }
  const RealVector& spectrum() const { return spectrum_; }  // descending, strictly positive
  /// Unitary whose columns are the shared eigenvectors, ordered so that
  /// rho() == basis() * spectrum().asDiagonal() * basis().adjoint().
  const Matrix& basis() const { return basis_; }

  Matrix rho_power(double a) const;  // rho_tau^a through the eigenbasis
  double condition_number() const { return spectrum_[0] / spectrum_[spectrum_.size() - 1]; }

 private:
  HermitianOperator H_;
  double tau_;
  double Z_;
  DensityMatrix rho_;
  HermitianOperator log_rho_;
  RealVector spectrum_;
  Matrix basis_;
};

GibbsState make_gibbs(const HermitianOperator& H, double tau);

/// Gram matrix of one of the weighted inner products on the vectorized
/// space, r in [0,1]:
///   state side:      <l,s> = Tr(l* rho^{-r} s rho^{-1+r})
///   observable side: <A,B> = Tr(A* rho^{r}  B rho^{1-r})
/// S_tau = state r=0, S_tau^T = state r=1, B_tau = observable r=0,
/// B_{tau,1} = observable r=1.
class WeightedMetric {
 public:
  static WeightedMetric state(const GibbsState& g, double r);
  static WeightedMetric observable(const GibbsState& g, double r);
  /// Same machinery against an arbitrary strictly positive reference state.
  static WeightedMetric state(const DensityMatrix& ref, double r);
  static WeightedMetric observable(const DensityMatrix& ref, double r);

  static WeightedMetric s_tau(const GibbsState& g) { return state(g, 0.0); }
  static WeightedMetric s_tau_transpose(const GibbsState& g) { return state(g, 1.0); }
  static WeightedMetric b_tau(const GibbsState& g) { return observable(g, 0.0); }
  static WeightedMetric b_tau_1(const GibbsState& g) { return observable(g, 1.0); }

  Side side() const { return side_; }
  double r() const { return r_; }
  Index dim() const { return dim_; }
  const Matrix& gram() const { return gram_; }
  const Matrix& sqrt_gram() const { return sqrt_gram_; }
  const Matrix& inv_sqrt_gram() const { return inv_sqrt_gram_; }

  Complex inner(const Matrix& X, const Matrix& Y) const;
  double norm(const Matrix& X) const;

 private:
  WeightedMetric(Side side, double r, const HermitianOperator& ref);

  Side side_;
  double r_;
  Index dim_;
  Matrix gram_;
  Matrix sqrt_gram_;
  Matrix inv_sqrt_gram_;
};

/// phi^{(r)}(A) = rho^{r/2} A rho^{1-r/2}; unitary from (B, <.,.>_tau)
/// onto the state space with the r-weighted inner product.
Matrix phi_map(const GibbsState& g, const Matrix& A, double r);
Matrix phi_map_inverse(const GibbsState& g, const Matrix& lam, double r);

/// Duality coupling (A, rho) = Tr(A rho).
Complex coupling(const Matrix& A, const Matrix& lam);

}  // namespace qlab
