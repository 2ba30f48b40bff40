#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qlab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ShapeError : Error {
  using Error::Error;
};
struct InvalidParameter : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct ConditioningError : Error {
  using Error::Error;
};
struct StructureViolation : Error {
  using Error::Error;
};
struct InternalError : Error {
  using Error::Error;
};
struct InsufficientJumps : Error {
  InsufficientJumps(const std::string& msg, int min_m) : Error(msg), minimum_required(min_m) {}
  int minimum_required;
};
struct ConditionAViolated : Error {
  using Error::Error;
};
struct QdbViolated : Error {
  using Error::Error;
};

bool is_finite(const Matrix& m);
void require_finite(const Matrix& m, const std::string& what);
void require_square(const Matrix& m, const std::string& what);

/// ||M - M*||_F / ||M||_F (0 for the zero matrix).
double hermiticity_defect(const Matrix& m);

/// Hermitian matrix with its eigendecomposition attached. Construction
/// rejects inputs with hermiticity defect above 1e-12; nothing is
/// symmetrized silently.
class HermitianOperator {
 public:
  explicit HermitianOperator(Matrix m);

  const Matrix& matrix() const { return matrix_; }
  const RealVector& eigenvalues() const { return eigenvalues_; }  // ascending
  const Matrix& eigenvectors() const { return eigenvectors_; }    // unitary columns
  Index dim() const { return matrix_.rows(); }

  /// U diag(f(eps)) U*. Throws DomainError naming the eigenvalue where
  /// f is non-finite.
  Matrix apply(const std::function<double(double)>& f) const;

  double operator_norm() const;  // max |eigenvalue|

 private:
  Matrix matrix_;
  RealVector eigenvalues_;
  Matrix eigenvectors_;
};

/// Unit-trace positive semidefinite Hermitian matrix.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix m);

  const Matrix& matrix() const { return matrix_; }
  Index dim() const { return matrix_.rows(); }
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  Matrix matrix_;
  double min_eigenvalue_;
};

/// Dense d^2 x d^2 matrix acting on column-stacked d x d matrices.
/// The vectorization convention is fixed repository-wide: entry M(i,j)
/// lands at index j*d + i.
struct SuperOperator {
  Index dim = 0;  // side length of the matrices acted on
  Matrix mat;     // dim^2 x dim^2

  Matrix apply(const Matrix& X) const;
};

double schatten_norm(const Matrix& M, double p);

Matrix hermitian_function(const HermitianOperator& M, const std::function<double(double)>& f);

Vector vec(const Matrix& M);
Matrix unvec(const Vector& v);

Matrix kron(const Matrix& A, const Matrix& B);

/// X -> A X B as a superoperator; matrix is B^T (x) A.
SuperOperator sandwich_superop(const Matrix& A, const Matrix& B);

SuperOperator identity_superop(Index d);

/// General dense matrix exponential (scaling-and-squaring Pade).
Matrix expm(const Matrix& M);

/// phi1(M) = sum_k M^k/(k+1)!  =  M^{-1}(e^M - 1) extended through 0;
/// (1/T) int_0^T e^{tM} dt = phi1(T M).
Matrix expm_phi1(const Matrix& M);

}  // namespace qlab
