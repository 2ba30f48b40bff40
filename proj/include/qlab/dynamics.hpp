#pragma once

#include <cstdint>
#include <vector>

#include "qlab/core.hpp"
#include "qlab/gibbs.hpp"
#include "qlab/lindblad.hpp"

namespace qlab {

/// e^{tL} x0 (state side) or e^{tL'} x0 (observable side), t >= 0.
Matrix evolve_exact(const GeneratorPair& gens, const Matrix& x0, double t, Side side);

enum class EvolveMethod { Exact, Trotter, Split };

struct EvolutionResult {
  std::vector<double> times;
  std::vector<Matrix> states;  // states or observables, matching `side`
  Side side;
  EvolveMethod method;
  int trotter_steps;      // per unit time, Trotter only
  double max_trace_drift; // state side: max |Tr x_t - Tr x_0|
  double max_hermiticity_defect;
};

/// Whole trajectory at the given times (ascending, t >= 0). Trotter uses
/// `trotter_steps` substeps per unit time, at least one per sample.
EvolutionResult evolve_trajectory(const GeneratorPair& gens, const Matrix& x0,
                                  const std::vector<double>& times, Side side,
                                  EvolveMethod method = EvolveMethod::Exact,
                                  int trotter_steps = 64);

/// Trotter product ((S_{t/n} o e^{Phi t/n})^n)(rho0) with
/// S_s(rho) = B_s rho B_s*, B_s = e^{(-iH - Y/2)s}. Every factor is
/// completely positive; first-order accurate in t/n.
Matrix evolve_trotter(const HermitianOperator& H, const JumpOperatorSet& jumps, const Matrix& rho0,
                      double t, int n);

struct SplitResult {
  Matrix value;        // e^{L0' t} e^{G' t} A0
  double discrepancy;  // ||value - e^{L' t} A0||_F
  bool qdb_consistent;
};

/// Splitting e^{L0't} e^{G't}; coincides with the exact flow iff QDB holds.
SplitResult evolve_split(const GeneratorPair& gens, const Matrix& A0, double t);

struct TrajectoryEnsemble {
  int paths;
  double dt;
  std::uint64_t seed;
  double mean;       // sample mean of <psi(t), A psi(t)>
  double std_error;  // standard error of the mean
  bool stability_warning;
};

/// Euler-Maruyama integration of the linear unraveling
/// d psi = (-iH - Y/2) psi dt + sum_j W_j psi dw_j, with one independent
/// RNG stream per path keyed by (seed, path index).
TrajectoryEnsemble unravel(const HermitianOperator& H, const JumpOperatorSet& jumps,
                           const Vector& psi0, double t, double dt, int paths, std::uint64_t seed,
                           const Matrix& A);

struct ChoiReport {
  Matrix choi;  // sum_ab E_ab (x) S(E_ab)
  double min_eigenvalue;
  double scale;               // spectral norm of the Hermitian part
  double hermiticity_defect;  // ||C - C*||_F / ||C||_F
  bool completely_positive;
};

ChoiReport choi_matrix(const SuperOperator& S, double tol = 1e-9);

/// Kraus operators M_k with S(X) = sum_k M_k X M_k*, from the spectral
/// decomposition of the Choi matrix; eigenpairs below cut*trace are dropped.
std::vector<Matrix> kraus_from_choi(const Matrix& choi, double cut = 1e-12);

/// (1/T) int_0^T e^{tL} x0 dt in closed form (phi1 of the generator).
Matrix ergodic_average(const GeneratorPair& gens, const Matrix& x0, double T, Side side);

/// Same average by Gauss-Legendre quadrature; independent cross-check.
Matrix ergodic_average_quadrature(const GeneratorPair& gens, const Matrix& x0, double T, Side side,
                                  int quad_points);

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace qlab
