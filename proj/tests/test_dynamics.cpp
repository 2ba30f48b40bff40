#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "qlab/dynamics.hpp"
#include "qlab/qdb.hpp"

using namespace qlab;
using namespace qlab::test;

namespace {

GeneratorPair thermal_gens(const GibbsState& g, double gamma_down) {
  return build_generators(g.hamiltonian(), thermal_qubit_jumps(g, gamma_down));
}

}  // namespace

TEST_CASE("evolve_exact basics") {
  GibbsState g = qubit_gibbs();
  GeneratorPair gens = thermal_gens(g, 0.8);
  Matrix rho0 = Matrix::Zero(2, 2);
  rho0(0, 0) = 1.0;

  CHECK((evolve_exact(gens, rho0, 0.0, Side::State) - rho0).norm() <= 1e-14);
  CHECK_THROWS_AS(evolve_exact(gens, rho0, -0.1, Side::State), InvalidParameter);

  // closed system: conjugation by e^{-iHt}
  GeneratorPair closed = build_generators(g.hamiltonian(), JumpOperatorSet());
  std::mt19937_64 rng(51);
  Matrix rho = random_density(rng, 2);
  double t = 1.3;
  Matrix u = expm(Matrix(Complex(0, -1) * t * g.hamiltonian().matrix()));
  Matrix expected = u * rho * u.adjoint();
  CHECK((evolve_exact(closed, rho, t, Side::State) - expected).norm() <= 1e-11);

  // long-time limit reaches the Gibbs state
  Matrix late = evolve_exact(gens, rho0, 50.0 / 0.5, Side::State);
  CHECK((late - g.rho().matrix()).norm() <= 1e-8);
}

TEST_CASE("semigroup law and flow duality") {
  std::mt19937_64 rng(52);
  GibbsState g = qubit_gibbs();
  GeneratorPair gens = thermal_gens(g, 0.7);
  Matrix rho = random_density(rng, 2);
  Matrix a = random_hermitian(rng, 2);

  Matrix two_step = evolve_exact(gens, evolve_exact(gens, rho, 0.4, Side::State), 0.9, Side::State);
  Matrix one_step = evolve_exact(gens, rho, 1.3, Side::State);
  CHECK((two_step - one_step).norm() <= 1e-9);

  for (double t : {0.1, 1.0, 5.0}) {
    Complex lhs = (evolve_exact(gens, a, t, Side::Observable) * rho).trace();
    Complex rhs = (a * evolve_exact(gens, rho, t, Side::State)).trace();
    CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(lhs)));
  }

  // positivity along the flow
  for (double t : {0.2, 1.0, 4.0}) {
    Matrix rt = evolve_exact(gens, rho, t, Side::State);
    Eigen::SelfAdjointEigenSolver<Matrix> es((rt + rt.adjoint()) / 2.0);
    CHECK(es.eigenvalues().minCoeff() >= -1e-9);
    CHECK(std::abs(rt.trace().real() - 1.0) <= 1e-10);
  }

  // contractivity of ||beta'_t(A)||_tau under QDB
  WeightedMetric b0 = WeightedMetric::b_tau(g);
  double prev = b0.norm(a);
  for (int k = 1; k <= 10; ++k) {
    double nrm = b0.norm(evolve_exact(gens, a, 0.3 * k, Side::Observable));
    CHECK(nrm <= prev + 1e-9);
    prev = nrm;
  }
}

TEST_CASE("trotter product: unitary limit, first order, CP steps") {
  GibbsState g = qubit_gibbs();
  HermitianOperator H(g.hamiltonian().matrix());
  std::mt19937_64 rng(53);
  Matrix rho = random_density(rng, 2);

  // no jumps: every step is exactly unitary
  GeneratorPair closed = build_generators(H, JumpOperatorSet());
  Matrix exact_closed = evolve_exact(closed, rho, 0.9, Side::State);
  CHECK((evolve_trotter(H, JumpOperatorSet(), rho, 0.9, 3) - exact_closed).norm() <= 1e-11);

  JumpOperatorSet jumps = thermal_qubit_jumps(g, 0.8);
  GeneratorPair gens = build_generators(H, jumps);
  Matrix exact = evolve_exact(gens, rho, 1.0, Side::State);
  double e64 = (evolve_trotter(H, jumps, rho, 1.0, 64) - exact).norm();
  double e128 = (evolve_trotter(H, jumps, rho, 1.0, 128) - exact).norm();
  double ratio = e64 / e128;
  CHECK(ratio >= 1.6);
  CHECK(ratio <= 2.4);

  // single-step local error is O(t^2): Richardson at two small t
  auto local = [&](double t) {
    return (evolve_trotter(H, jumps, rho, t, 1) - evolve_exact(gens, rho, t, Side::State)).norm() /
           (t * t);
  };
  double c1 = local(1e-2), c2 = local(5e-3);
  CHECK(c1 / c2 >= 0.25);
  CHECK(c1 / c2 <= 4.0);

  // intermediate states stay positive
  Matrix mid = evolve_trotter(H, jumps, rho, 2.0, 5);
  Eigen::SelfAdjointEigenSolver<Matrix> es((mid + mid.adjoint()) / 2.0);
  CHECK(es.eigenvalues().minCoeff() >= -1e-9);

  CHECK_THROWS_AS(evolve_trotter(H, jumps, rho, 1.0, 0), InvalidParameter);
}

TEST_CASE("split evolution matches exactly under QDB and fails without it") {
  GibbsState g = qubit_gibbs();
  GeneratorPair gens = thermal_gens(g, 0.9);
  std::mt19937_64 rng(54);
  Matrix one = Matrix::Identity(2, 2);

  SplitResult id = evolve_split(gens, one, 2.0);
  CHECK((id.value - one).norm() <= 1e-12);

  Matrix a = random_hermitian(rng, 2);
  SplitResult r = evolve_split(gens, a, 0.7);
  CHECK(r.qdb_consistent);
  CHECK(r.discrepancy <= 1e-11);

  GeneratorPair bad = build_generators(g.hamiltonian(), JumpOperatorSet({sigma_x()}));
  SplitResult rb = evolve_split(bad, a, 0.7);
  CHECK_FALSE(rb.qdb_consistent);
  CHECK(rb.discrepancy > 1e-4);
}

TEST_CASE("unravel: deterministic limit, duality, reproducibility") {
  GibbsState g = qubit_gibbs();
  HermitianOperator H(g.hamiltonian().matrix());
  Vector psi0(2);
  psi0 << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);

  // closed system: zero variance, integrator-level accuracy
  TrajectoryEnsemble det = unravel(H, JumpOperatorSet(), psi0, 1.0, 1e-3, 8, 7, sigma_z());
  CHECK(det.std_error == 0.0);
  Vector psi_t = expm(Matrix(Complex(0, -1) * g.hamiltonian().matrix())) * psi0;
  double schroedinger = (psi_t.dot(sigma_z() * psi_t)).real();
  CHECK(std::abs(det.mean - schroedinger) <= 5e-3);

  JumpOperatorSet jumps = thermal_qubit_jumps(g, 0.8);
  GeneratorPair gens = build_generators(H, jumps);
  TrajectoryEnsemble mc = unravel(H, jumps, psi0, 1.0, 1e-3, 20000, 12345, sigma_z());
  Matrix rho0 = psi0 * psi0.adjoint();
  double exact = (sigma_z() * evolve_exact(gens, rho0, 1.0, Side::State)).trace().real();
  CHECK(std::abs(mc.mean - exact) <= 4.0 * mc.std_error + 5.0 * mc.dt);

  // trace preservation in expectation: A = 1
  TrajectoryEnsemble unit =
      unravel(H, jumps, psi0, 1.0, 1e-3, 5000, 99, Matrix(Matrix::Identity(2, 2)));
  CHECK(std::abs(unit.mean - 1.0) <= 4.0 * unit.std_error + 5.0 * unit.dt);

  // bit-identical restart with the same seed
  TrajectoryEnsemble again = unravel(H, jumps, psi0, 1.0, 1e-3, 20000, 12345, sigma_z());
  CHECK(mc.mean == again.mean);
  CHECK(mc.std_error == again.std_error);

  Vector bad = psi0 * 2.0;
  CHECK_THROWS_AS(unravel(H, jumps, bad, 1.0, 1e-3, 10, 1, sigma_z()), InvalidParameter);
  CHECK_THROWS_AS(unravel(H, jumps, psi0, 1.0, 2.0, 10, 1, sigma_z()), InvalidParameter);

  // dt * ||Y|| > 0.1 raises the stability flag
  TrajectoryEnsemble coarse = unravel(H, jumps, psi0, 1.0, 0.25, 8, 1, sigma_z());
  CHECK(coarse.stability_warning);
  CHECK_FALSE(mc.stability_warning);
}

TEST_CASE("choi matrix: identity, transpose control, GKSL flows") {
  SuperOperator id = identity_superop(2);
  ChoiReport rid = choi_matrix(id);
  CHECK(rid.completely_positive);
  CHECK(std::abs(rid.min_eigenvalue) <= 1e-12);
  // rank-one projector onto vec(identity), eigenvalue d
  Eigen::SelfAdjointEigenSolver<Matrix> es((rid.choi + rid.choi.adjoint()) / 2.0);
  CHECK(es.eigenvalues().maxCoeff() == doctest::Approx(2.0));

  // transpose map: swap operator, min eigenvalue -1
  Matrix swap = Matrix::Zero(4, 4);
  swap(0, 0) = swap(3, 3) = 1.0;
  swap(1, 2) = swap(2, 1) = 1.0;
  ChoiReport rt = choi_matrix(SuperOperator{2, swap});
  CHECK_FALSE(rt.completely_positive);
  CHECK(rt.min_eigenvalue == doctest::Approx(-1.0));

  GibbsState g = qubit_gibbs();
  GeneratorPair gens = thermal_gens(g, 0.8);
  for (double t : {0.1, 1.0, 10.0}) {
    ChoiReport r = choi_matrix(SuperOperator{2, expm(t * gens.L.mat)});
    CHECK(r.completely_positive);
    CHECK(r.min_eigenvalue >= -1e-11 * std::max(1.0, r.scale));
  }
}

TEST_CASE("kraus extraction reproduces the map") {
  std::mt19937_64 rng(55);
  JumpOperatorSet jumps({random_matrix(rng, 2), random_matrix(rng, 2)});
  Matrix phi = Matrix::Zero(4, 4);
  for (const Matrix& w : jumps.jumps()) phi += kron(w.conjugate(), w);
  SuperOperator S{2, phi};
  std::vector<Matrix> kraus = kraus_from_choi(choi_matrix(S).choi);
  Matrix rebuilt = Matrix::Zero(4, 4);
  for (const Matrix& m : kraus) rebuilt += kron(m.conjugate(), m);
  CHECK((rebuilt - phi).norm() <= 1e-10 * std::max(1.0, phi.norm()));
}

TEST_CASE("ergodic averages: stationary input, dephasing limit, quadrature cross-check") {
  GibbsState g = qubit_gibbs();
  GeneratorPair gens = thermal_gens(g, 0.8);

  // stationary input is a fixed point of the average
  for (double T : {1.0, 10.0, 100.0}) {
    Matrix avg = ergodic_average(gens, g.rho().matrix(), T, Side::State);
    CHECK((avg - g.rho().matrix()).norm() <= 1e-11);
  }

  // closed system with nondegenerate H: the long average dephases
  GeneratorPair closed = build_generators(g.hamiltonian(), JumpOperatorSet());
  std::mt19937_64 rng(56);
  Matrix rho = random_density(rng, 2);
  Matrix diag = rho;
  diag(0, 1) = diag(1, 0) = 0.0;
  Matrix avg = ergodic_average(closed, rho, 4000.0, Side::State);
  CHECK((avg - diag).norm() <= 2e-3);  // off-diagonals decay like 1/T

  // Gauss-Legendre cross-check
  Matrix rho0 = Matrix::Zero(2, 2);
  rho0(0, 0) = 1.0;
  for (double T : {5.0, 40.0}) {
    Matrix closed_form = ergodic_average(gens, rho0, T, Side::State);
    Matrix quad = ergodic_average_quadrature(gens, rho0, T, Side::State, 64);
    CHECK((closed_form - quad).norm() <= 1e-8 * std::max(1.0, closed_form.norm()));
  }
  CHECK_THROWS_AS(ergodic_average(gens, rho0, -1.0, Side::State), InvalidParameter);
}

TEST_CASE("evolution trajectories carry their invariants") {
  GibbsState g = qubit_gibbs();
  GeneratorPair gens = thermal_gens(g, 0.8);
  std::mt19937_64 rng(57);
  Matrix rho0 = random_density(rng, 2);
  std::vector<double> times{0.0, 0.3, 0.7, 1.5, 3.0};

  EvolutionResult exact = evolve_trajectory(gens, rho0, times, Side::State);
  CHECK(exact.states.size() == times.size());
  CHECK(exact.max_trace_drift <= 1e-9);
  CHECK(exact.max_hermiticity_defect <= 1e-10);

  EvolutionResult trotter =
      evolve_trajectory(gens, rho0, times, Side::State, EvolveMethod::Trotter, 128);
  for (std::size_t k = 0; k < times.size(); ++k)
    CHECK((trotter.states[k] - exact.states[k]).norm() <= 0.05);

  Matrix a0 = random_hermitian(rng, 2);
  EvolutionResult split =
      evolve_trajectory(gens, a0, times, Side::Observable, EvolveMethod::Split);
  for (std::size_t k = 0; k < times.size(); ++k) {
    Matrix direct = evolve_exact(gens, a0, times[k], Side::Observable);
    CHECK((split.states[k] - direct).norm() <= 1e-9 * std::max(1.0, direct.norm()));
  }

  // observable side fixes the identity
  EvolutionResult ones = evolve_trajectory(gens, Matrix(Matrix::Identity(2, 2)),
                                           {0.5, 2.0}, Side::Observable);
  for (const Matrix& m : ones.states)
    CHECK((m - Matrix::Identity(2, 2)).norm() <= 1e-10);

  CHECK_THROWS_AS(evolve_trajectory(gens, rho0, {}, Side::State), InvalidParameter);
  CHECK_THROWS_AS(evolve_trajectory(gens, rho0, {1.0, 0.5}, Side::State), InvalidParameter);
  CHECK_THROWS_AS(evolve_trajectory(gens, rho0, {0.5}, Side::Observable, EvolveMethod::Trotter),
                  InvalidParameter);
}

TEST_CASE("gauss-legendre nodes integrate polynomials exactly") {
  std::vector<double> x, w;
  gauss_legendre(5, x, w);
  double sum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) sum += w[k];
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  // degree-9 monomial on [0,1]
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) acc += w[k] * std::pow(x[k], 9);
  CHECK(acc == doctest::Approx(0.1).epsilon(1e-13));
}
