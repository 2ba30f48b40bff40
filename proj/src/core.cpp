#include "qlab/core.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace qlab {

bool is_finite(const Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) {
      const Complex& z = m(i, j);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
  return true;
}

void require_finite(const Matrix& m, const std::string& what) {
  if (!is_finite(m)) throw InvalidParameter(what + ": non-finite entries");
}

void require_square(const Matrix& m, const std::string& what) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a square matrix, got " << m.rows() << "x" << m.cols();
    throw ShapeError(os.str());
  }
}

double hermiticity_defect(const Matrix& m) {
  double nrm = m.norm();
  if (nrm == 0.0) return 0.0;
  return (m - m.adjoint()).norm() / nrm;
}

HermitianOperator::HermitianOperator(Matrix m) : matrix_(std::move(m)) {
  require_square(matrix_, "HermitianOperator");
  require_finite(matrix_, "HermitianOperator");
  if (hermiticity_defect(matrix_) > 1e-12)
    throw InvalidParameter("HermitianOperator: input is not Hermitian (defect > 1e-12); refusing to symmetrize");
  Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_);
  if (es.info() != Eigen::Success) throw InternalError("HermitianOperator: eigendecomposition failed");
  eigenvalues_ = es.eigenvalues();
  eigenvectors_ = es.eigenvectors();
}

Matrix HermitianOperator::apply(const std::function<double(double)>& f) const {
  RealVector fe(eigenvalues_.size());
  for (Index k = 0; k < eigenvalues_.size(); ++k) {
    double v = f(eigenvalues_[k]);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "hermitian_function: f is not finite at eigenvalue " << eigenvalues_[k];
      throw DomainError(os.str());
    }
    fe[k] = v;
  }
  Matrix out = eigenvectors_ * fe.asDiagonal() * eigenvectors_.adjoint();
  // f real on a Hermitian spectrum: the result is Hermitian by construction,
  // round only the antisymmetric noise away
  return (out + out.adjoint()) / 2.0;
}

double HermitianOperator::operator_norm() const {
  if (eigenvalues_.size() == 0) return 0.0;
  return std::max(std::abs(eigenvalues_[0]), std::abs(eigenvalues_[eigenvalues_.size() - 1]));
}

DensityMatrix::DensityMatrix(Matrix m) : matrix_(std::move(m)) {
  require_square(matrix_, "DensityMatrix");
  require_finite(matrix_, "DensityMatrix");
  if (hermiticity_defect(matrix_) > 1e-12)
    throw InvalidParameter("DensityMatrix: not Hermitian to 1e-12");
  Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_);
  min_eigenvalue_ = es.eigenvalues().minCoeff();
  if (min_eigenvalue_ < -1e-12)
    throw InvalidParameter("DensityMatrix: negative eigenvalue below -1e-12");
  double tr = matrix_.trace().real();
  if (std::abs(tr - 1.0) > 1e-12)
    throw InvalidParameter("DensityMatrix: trace differs from 1 beyond 1e-12");
}

Matrix SuperOperator::apply(const Matrix& X) const {
  if (X.rows() != dim || X.cols() != dim) {
    std::ostringstream os;
    os << "SuperOperator::apply: expected " << dim << "x" << dim << " input, got " << X.rows()
       << "x" << X.cols();
    throw ShapeError(os.str());
  }
  return unvec(mat * vec(X));
}

double schatten_norm(const Matrix& M, double p) {
  require_finite(M, "schatten_norm");
  if (std::isnan(p) || (p < 1.0)) throw InvalidParameter("schatten_norm: p must be >= 1 or infinity");
  Eigen::JacobiSVD<Matrix> svd(M);
  const RealVector& s = svd.singularValues();
  if (std::isinf(p)) return s.size() ? s.maxCoeff() : 0.0;
  double acc = 0.0;
  for (Index k = 0; k < s.size(); ++k) acc += std::pow(s[k], p);
  return std::pow(acc, 1.0 / p);
}

Matrix hermitian_function(const HermitianOperator& M, const std::function<double(double)>& f) {
  return M.apply(f);
}

Vector vec(const Matrix& M) {
  // column stacking: M(i,j) -> index j*d + i
  return Eigen::Map<const Vector>(M.data(), M.size());
}

Matrix unvec(const Vector& v) {
  const auto n = v.size();
  const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n))));
  if (d * d != n) throw ShapeError("unvec: length is not a perfect square");
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

Matrix kron(const Matrix& A, const Matrix& B) {
  Matrix out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j) out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

SuperOperator sandwich_superop(const Matrix& A, const Matrix& B) {
  require_square(A, "sandwich_superop A");
  require_square(B, "sandwich_superop B");
  if (A.rows() != B.rows()) throw ShapeError("sandwich_superop: dimension mismatch between A and B");
  return SuperOperator{A.rows(), kron(B.transpose(), A)};
}

SuperOperator identity_superop(Index d) {
  return SuperOperator{d, Matrix::Identity(d * d, d * d)};
}

Matrix expm(const Matrix& M) {
  require_square(M, "expm");
  require_finite(M, "expm");
  return M.exp();
}

Matrix expm_phi1(const Matrix& M) {
  require_square(M, "expm_phi1");
  const Index n = M.rows();
  // exp([[M, I], [0, 0]]) = [[e^M, phi1(M)], [0, I]]
  Matrix block = Matrix::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = M;
  block.topRightCorner(n, n) = Matrix::Identity(n, n);
  Matrix e = block.exp();
  return e.topRightCorner(n, n);
}

}  // namespace qlab
