#include "qlab/lindblad.hpp"

#include <cmath>

namespace qlab {

namespace {
const Complex kI(0.0, 1.0);
}

JumpOperatorSet::JumpOperatorSet(std::vector<Matrix> ws) : jumps_(std::move(ws)) {
  if (jumps_.empty()) return;
  dim_ = jumps_[0].rows();
  for (const Matrix& w : jumps_) {
    require_square(w, "JumpOperatorSet");
    require_finite(w, "JumpOperatorSet");
    if (w.rows() != dim_) throw ShapeError("JumpOperatorSet: jump operators of mixed dimension");
  }
  Y_ = Matrix::Zero(dim_, dim_);
  for (const Matrix& w : jumps_) Y_ += w.adjoint() * w;
  Y_ = (Y_ + Y_.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(Y_);
  double lo = es.eigenvalues().minCoeff();
  double scale = std::max(1.0, es.eigenvalues().maxCoeff());
  if (lo < -1e-12 * scale) throw InternalError("JumpOperatorSet: Y = sum W*W not PSD");
  Y_norm_ = es.eigenvalues().cwiseAbs().maxCoeff();
}

GeneratorPair build_generators(const HermitianOperator& H, const JumpOperatorSet& jumps) {
  const Index d = H.dim();
  if (!jumps.empty() && jumps.dim() != d)
    throw ShapeError("build_generators: H and jump operators disagree in dimension");

  const Matrix& Hm = H.matrix();
  const Matrix id = Matrix::Identity(d, d);
  Matrix comm = kron(id, Hm) - kron(Hm.transpose(), id);

  Matrix gp = Matrix::Zero(d * d, d * d);
  Matrix g = Matrix::Zero(d * d, d * d);
  if (!jumps.empty()) {
    const Matrix& Y = jumps.Y();
    Matrix anti = 0.5 * (kron(id, Y) + kron(Y.transpose(), id));
    for (const Matrix& w : jumps.jumps()) {
      g += kron(w.conjugate(), w);
      gp += kron(w.transpose(), w.adjoint());
    }
    g -= anti;
    gp -= anti;
  }

  GeneratorPair out;
  out.L0 = SuperOperator{d, -kI * comm};
  out.G = SuperOperator{d, g};
  out.L = SuperOperator{d, out.L0.mat + g};
  out.L0p = SuperOperator{d, kI * comm};
  out.Gp = SuperOperator{d, gp};
  out.Lp = SuperOperator{d, out.L0p.mat + gp};
  out.H = Hm;
  out.jumps = jumps;
  return out;
}

Matrix phi_apply(const JumpOperatorSet& jumps, const Matrix& X, Side side) {
  require_square(X, "phi_apply");
  if (jumps.empty()) return Matrix::Zero(X.rows(), X.cols());
  if (X.rows() != jumps.dim()) throw ShapeError("phi_apply: dimension mismatch");
  Matrix out = Matrix::Zero(X.rows(), X.cols());
  for (const Matrix& w : jumps.jumps())
    out += (side == Side::Observable) ? Matrix(w.adjoint() * X * w) : Matrix(w * X * w.adjoint());
  return out;
}

Matrix dissipation(const JumpOperatorSet& jumps, const Matrix& A, const Matrix& B) {
  require_square(A, "dissipation A");
  require_square(B, "dissipation B");
  if (A.rows() != B.rows()) throw ShapeError("dissipation: dimension mismatch");
  if (jumps.empty()) return Matrix::Zero(A.rows(), A.cols());
  if (A.rows() != jumps.dim()) throw ShapeError("dissipation: dimension mismatch with jumps");

  auto gprime = [&jumps](const Matrix& X) -> Matrix {
    return phi_apply(jumps, X, Side::Observable) - 0.5 * (jumps.Y() * X + X * jumps.Y());
  };
  return gprime(A.adjoint() * B) - gprime(A).adjoint() * B - A.adjoint() * gprime(B);
}

GramFormResult gram_form_G(const GibbsState& gibbs, const JumpOperatorSet& jumps, const Matrix& A,
                           const Matrix& B) {
  const Matrix& rho = gibbs.rho().matrix();
  if (A.rows() != gibbs.dim() || B.rows() != gibbs.dim())
    throw ShapeError("gram_form_G: dimension mismatch");

  Complex value = 0.0;
  for (const Matrix& w : jumps.jumps()) {
    Matrix ca = w * A - A * w;
    Matrix cb = w * B - B * w;
    value += -0.5 * (ca.adjoint() * cb * rho).trace();
  }

  Matrix gpB = phi_apply(jumps, B, Side::Observable);
  if (!jumps.empty()) gpB -= 0.5 * (jumps.Y() * B + B * jumps.Y());
  Complex direct = (A.adjoint() * gpB * rho).trace();  // <A, G'(B)>_tau

  double scale = std::max(1.0, std::abs(value) + std::abs(direct));
  double disc = std::abs(value - direct);
  return GramFormResult{value, direct, disc, disc <= 1e-6 * scale};
}

}  // namespace qlab
