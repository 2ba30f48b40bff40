#pragma once

#include <vector>

#include "qlab/core.hpp"
#include "qlab/gibbs.hpp"

namespace qlab {

/// Finite family {W_j} of jump operators with Y = sum_j W_j* W_j.
class JumpOperatorSet {
 public:
  JumpOperatorSet() = default;
  explicit JumpOperatorSet(std::vector<Matrix> ws);

  const std::vector<Matrix>& jumps() const { return jumps_; }
  std::size_t size() const { return jumps_.size(); }
  bool empty() const { return jumps_.empty(); }
  Index dim() const { return dim_; }
  const Matrix& Y() const { return Y_; }
  double Y_operator_norm() const { return Y_norm_; }

 private:
  std::vector<Matrix> jumps_;
  Index dim_ = 0;
  Matrix Y_;
  double Y_norm_ = 0.0;
};

/// The vNL generator L = L0 + G on states and the HL generator
/// L' = L0' + G' on observables, as dense superoperators under the
/// column-stacking convention:
///   L0  = -i(I (x) H - H^T (x) I)
///   G   = sum_j conj(W_j) (x) W_j - (I (x) Y + Y^T (x) I)/2
///   L0' = +i(I (x) H - H^T (x) I)
///   G'  = sum_j W_j^T (x) W_j*  - (I (x) Y + Y^T (x) I)/2
struct GeneratorPair {
  SuperOperator L, L0, G;     // state side
  SuperOperator Lp, L0p, Gp;  // observable side
  Matrix H;
  JumpOperatorSet jumps;

  Index dim() const { return L.dim; }
};

GeneratorPair build_generators(const HermitianOperator& H, const JumpOperatorSet& jumps);

/// Completely positive part: Phi'(A) = sum W* A W (observable side) or
/// Phi(rho) = sum W rho W* (state side).
Matrix phi_apply(const JumpOperatorSet& jumps, const Matrix& X, Side side);

/// Dissipation function D(A,B) = G'(A*B) - G'(A)*B - A*G'(B); equals
/// sum_j [W_j,A]*[W_j,B].
Matrix dissipation(const JumpOperatorSet& jumps, const Matrix& A, const Matrix& B);

struct GramFormResult {
  Complex value;        // -1/2 sum_j Tr([W_j,A]*[W_j,B] rho)
  Complex direct;       // <A, G'(B)>_tau evaluated through the metric
  double discrepancy;   // |value - direct|
  bool qdb_consistent;  // discrepancy <= 1e-6 * scale
};

/// <A, G'(B)>_tau via the commutator-sum formula, cross-checked against
/// the direct inner product. Disagreement signals that QDB fails.
GramFormResult gram_form_G(const GibbsState& gibbs, const JumpOperatorSet& jumps, const Matrix& A,
                           const Matrix& B);

}  // namespace qlab
