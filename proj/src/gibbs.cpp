#include "qlab/gibbs.hpp"

#include <cmath>
#include <sstream>

namespace qlab {

namespace {

constexpr double kMaxStateCondition = 1e12;

Matrix power_from_eigs(const Matrix& basis, const RealVector& eigs, double a) {
  RealVector p(eigs.size());
  for (Index k = 0; k < eigs.size(); ++k) p[k] = std::pow(eigs[k], a);
  Matrix out = basis * p.asDiagonal() * basis.adjoint();
  return (out + out.adjoint()) / 2.0;
}

}  // namespace

GibbsState::GibbsState(HermitianOperator H, double tau)
    : H_(std::move(H)),
      tau_(tau),
      Z_(0.0),
      rho_(Matrix::Identity(1, 1)),  // replaced below
      log_rho_(Matrix::Zero(1, 1)),
      spectrum_(),
      basis_() {
  if (!(tau > 0.0)) throw InvalidParameter("make_gibbs: tau must be positive");
  const Index d = H_.dim();
  const RealVector& eps = H_.eigenvalues();  // ascending

  // Work with shifted exponents so Z never overflows.
  const double eps0 = eps[0];
  RealVector w(d);
  double Zs = 0.0;
  for (Index k = 0; k < d; ++k) {
    w[k] = std::exp(-(eps[k] - eps0) / tau_);
    Zs += w[k];
  }
  spectrum_.resize(d);
  for (Index k = 0; k < d; ++k) spectrum_[k] = w[k] / Zs;  // descending since eps ascending
  if (spectrum_[d - 1] <= 1e-300) {
    throw ConditioningError(
        "make_gibbs: smallest Gibbs eigenvalue underflowed to 0; "
        "increase tau or reduce the spectral spread of H");
  }
  Z_ = Zs * std::exp(-eps0 / tau_);
  if (!std::isfinite(Z_) || Z_ <= 0.0)
    throw ConditioningError("make_gibbs: partition function not representable; rescale H or tau");

  basis_ = H_.eigenvectors();
  Matrix rho = basis_ * spectrum_.asDiagonal() * basis_.adjoint();
  rho_ = DensityMatrix((rho + rho.adjoint()) / 2.0);

  RealVector lg(d);
  for (Index k = 0; k < d; ++k) lg[k] = std::log(spectrum_[k]);
  Matrix lr = basis_ * lg.asDiagonal() * basis_.adjoint();
  log_rho_ = HermitianOperator((lr + lr.adjoint()) / 2.0);
}

Matrix GibbsState::rho_power(double a) const { return power_from_eigs(basis_, spectrum_, a); }

GibbsState make_gibbs(const HermitianOperator& H, double tau) { return GibbsState(H, tau); }

WeightedMetric::WeightedMetric(Side side, double r, const HermitianOperator& ref)
    : side_(side), r_(r), dim_(ref.dim()) {
  if (r < 0.0 || r > 1.0) throw InvalidParameter("WeightedMetric: r must lie in [0,1]");
  const RealVector& ev = ref.eigenvalues();
  double lo = ev[0], hi = ev[ev.size() - 1];
  if (lo <= 0.0) throw InvalidParameter("WeightedMetric: reference state must be strictly positive");
  if (side == Side::State && hi / lo > kMaxStateCondition) {
    std::ostringstream os;
    os << "WeightedMetric: reference state condition number " << hi / lo
       << " exceeds 1e12; rho^{-1} would dominate the Gram matrix";
    throw ConditioningError(os.str());
  }

  auto pw = [&ref](double a) {
    return ref.apply([a](double x) { return std::pow(x, a); });
  };
  // state:      Tr(l* rho^{-r} s rho^{-1+r})  ->  (rho^{-1+r})^T (x) rho^{-r}
  // observable: Tr(A* rho^{r}  B rho^{1-r})   ->  (rho^{1-r})^T  (x) rho^{r}
  Matrix left = (side == Side::State) ? pw(-r) : pw(r);
  Matrix right = (side == Side::State) ? pw(-1.0 + r) : pw(1.0 - r);
  gram_ = kron(right.transpose(), left);
  gram_ = (gram_ + gram_.adjoint()) / 2.0;

  // The Gram matrix is a Kronecker product of powers of rho; its square
  // root factors likewise, no solver needed.
  Matrix left_h = (side == Side::State) ? pw(-r / 2) : pw(r / 2);
  Matrix right_h = (side == Side::State) ? pw((-1.0 + r) / 2) : pw((1.0 - r) / 2);
  sqrt_gram_ = kron(right_h.transpose(), left_h);
  sqrt_gram_ = (sqrt_gram_ + sqrt_gram_.adjoint()) / 2.0;
  Matrix left_hi = (side == Side::State) ? pw(r / 2) : pw(-r / 2);
  Matrix right_hi = (side == Side::State) ? pw((1.0 - r) / 2) : pw((-1.0 + r) / 2);
  inv_sqrt_gram_ = kron(right_hi.transpose(), left_hi);
  inv_sqrt_gram_ = (inv_sqrt_gram_ + inv_sqrt_gram_.adjoint()) / 2.0;
}

WeightedMetric WeightedMetric::state(const GibbsState& g, double r) {
  HermitianOperator ref(g.rho().matrix());
  return WeightedMetric(Side::State, r, ref);
}

WeightedMetric WeightedMetric::observable(const GibbsState& g, double r) {
  HermitianOperator ref(g.rho().matrix());
  return WeightedMetric(Side::Observable, r, ref);
}

WeightedMetric WeightedMetric::state(const DensityMatrix& ref, double r) {
  return WeightedMetric(Side::State, r, HermitianOperator(ref.matrix()));
}

WeightedMetric WeightedMetric::observable(const DensityMatrix& ref, double r) {
  return WeightedMetric(Side::Observable, r, HermitianOperator(ref.matrix()));
}

Complex WeightedMetric::inner(const Matrix& X, const Matrix& Y) const {
  if (X.rows() != dim_ || X.cols() != dim_ || Y.rows() != dim_ || Y.cols() != dim_)
    throw ShapeError("WeightedMetric::inner: dimension mismatch");
  return vec(X).dot(gram_ * vec(Y));  // Eigen's dot conjugates the left factor
}

double WeightedMetric::norm(const Matrix& X) const {
  double v = inner(X, X).real();
  return std::sqrt(std::max(0.0, v));
}

Matrix phi_map(const GibbsState& g, const Matrix& A, double r) {
  if (r < 0.0 || r > 1.0) throw InvalidParameter("phi_map: r must lie in [0,1]");
  if (A.rows() != g.dim() || A.cols() != g.dim()) throw ShapeError("phi_map: dimension mismatch");
  return g.rho_power(r / 2) * A * g.rho_power(1.0 - r / 2);
}

Matrix phi_map_inverse(const GibbsState& g, const Matrix& lam, double r) {
  if (r < 0.0 || r > 1.0) throw InvalidParameter("phi_map_inverse: r must lie in [0,1]");
  if (lam.rows() != g.dim() || lam.cols() != g.dim())
    throw ShapeError("phi_map_inverse: dimension mismatch");
  return g.rho_power(-r / 2) * lam * g.rho_power(-(1.0 - r / 2));
}

Complex coupling(const Matrix& A, const Matrix& lam) {
  if (A.rows() != lam.rows() || A.cols() != lam.cols() || A.rows() != A.cols())
    throw ShapeError("coupling: dimension mismatch");
  return (A * lam).trace();
}

}  // namespace qlab
