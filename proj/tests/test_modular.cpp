#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "qlab/modular.hpp"
#include "qlab/qdb.hpp"

using namespace qlab;
using namespace qlab::test;

TEST_CASE("modular data on the maximally mixed and qubit Gibbs states") {
  GibbsState flat = make_gibbs(HermitianOperator(Matrix::Zero(2, 2)), 1.0);
  ModularData triv = build_modular(flat);
  CHECK(triv.L_tau.mat.norm() <= 1e-12);
  CHECK((unvec(triv.omega) - Matrix::Identity(2, 2) / std::sqrt(2.0)).norm() <= 1e-13);

  GibbsState g = qubit_gibbs();
  ModularData mod = build_modular(g);
  // L_tau eigenvalues are the Bohr frequencies {0, 0, 1, -1}
  Eigen::SelfAdjointEigenSolver<Matrix> es(mod.L_tau.mat);
  RealVector ev = es.eigenvalues();
  CHECK(ev[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(ev[1]) <= 1e-12);
  CHECK(std::abs(ev[2]) <= 1e-12);
  CHECK(ev[3] == doctest::Approx(1.0).epsilon(1e-12));

  CHECK((mod.L_tau.mat * mod.omega).norm() <= 1e-12);
  CHECK((modular_conjugation(mod.omega) - mod.omega).norm() <= 1e-13);
  CHECK(mod.covariance_residual <= 1e-11);

  // e^{i L_tau t} is HS-unitary
  std::mt19937_64 rng(71);
  Matrix u = expm(Matrix(Complex(0, 1) * 0.8 * mod.L_tau.mat));
  for (int trial = 0; trial < 10; ++trial) {
    Vector x = vec(random_matrix(rng, 2));
    CHECK(std::abs((u * x).norm() - x.norm()) <= 1e-10 * x.norm());
  }
}

TEST_CASE("covariance identity at d = 3") {
  Matrix h = Matrix::Zero(3, 3);
  h(1, 1) = 0.9;
  h(2, 2) = 2.2;
  GibbsState g = make_gibbs(HermitianOperator(h), 1.0);
  ModularData mod = build_modular(g);
  CHECK(mod.covariance_residual <= 1e-11);
}

TEST_CASE("S operator identity") {
  GibbsState g = qubit_gibbs();
  ModularData mod = build_modular(g);

  CHECK(check_S_operator(mod, Matrix::Identity(2, 2)) <= 1e-14);

  std::mt19937_64 rng(72);
  Matrix a = random_hermitian(rng, 2);
  CHECK(check_S_operator(mod, a) <= 1e-11);

  for (Index d : {2, 3, 4}) {
    Matrix h = Matrix::Zero(d, d);
    for (Index k = 0; k < d; ++k) h(k, k) = 0.8 * static_cast<double>(k);
    GibbsState gd = make_gibbs(HermitianOperator(h), 1.0);
    ModularData md = build_modular(gd);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial)
      worst = std::max(worst, check_S_operator(md, random_matrix(rng, d)));
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("modular commutation under QDB, with the sigma_x negative control") {
  GibbsState g = qubit_gibbs();
  JumpOperatorSet thermal = thermal_qubit_jumps(g, 0.8);
  GeneratorPair gens = build_generators(g.hamiltonian(), thermal);
  ModularData mod = build_modular(g);

  ModularCommutationReport ok = check_modular_commutation(mod, gens, g);
  CHECK(ok.commutation_residual <= 1e-11);
  CHECK(ok.self_adjoint_residual <= 1e-11);
  CHECK(ok.s_commutation_residual <= 1e-11);
  CHECK(ok.qdb_consistent);

  GeneratorPair bad = build_generators(g.hamiltonian(), JumpOperatorSet({sigma_x()}));
  ModularCommutationReport fail = check_modular_commutation(mod, bad, g);
  CHECK(fail.commutation_residual > 1e-3);
  CHECK(fail.self_adjoint_residual > 1e-3);
  CHECK_FALSE(fail.qdb_consistent);
  // the *-map property holds regardless of QDB
  CHECK(fail.s_commutation_residual <= 1e-10);

  GeneratorPair closed = build_generators(g.hamiltonian(), JumpOperatorSet());
  ModularCommutationReport zero = check_modular_commutation(mod, closed, g);
  CHECK(zero.commutation_residual <= 1e-14);
  CHECK(zero.self_adjoint_residual <= 1e-14);
  CHECK(zero.s_commutation_residual <= 1e-14);
}

TEST_CASE("QDB implies modular commutation and splitting co-occur, d in 2..5") {
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> eu(0.0, 2.5), ku(0.2, 1.2);
  for (Index d = 2; d <= 5; ++d) {
    RealVector e(d);
    for (int attempt = 0;; ++attempt) {
      for (Index k = 0; k < d; ++k) e[k] = eu(rng);
      std::sort(e.data(), e.data() + d);
      RealVector rho(d);
      double sum = 0.0;
      for (Index k = 0; k < d; ++k) sum += (rho[k] = std::exp(-e[k]));
      rho /= sum;
      if (check_condition_A(SpectrumSpec(rho)).holds) break;
      REQUIRE(attempt < 200);
    }
    Matrix h = Matrix::Zero(d, d);
    for (Index k = 0; k < d; ++k) h(k, k) = e[k];
    GibbsState g = make_gibbs(HermitianOperator(h), 1.0);
    RealMatrix upper = RealMatrix::Zero(d, d);
    for (Index r = 0; r < d; ++r)
      for (Index rp = r; rp < d; ++rp) upper(r, rp) = ku(rng);
    BohrTable bohr = BohrTable::build(SpectrumSpec::from_gibbs(g));
    QdbJumpFamily fam = synthesize(g, upper, 2 * bohr.positive_count + 1);
    GeneratorPair gens = build_generators(g.hamiltonian(), fam.jumps);
    REQUIRE(verify_qdb(g.rho(), gens).pass);

    ModularData mod = build_modular(g);
    ModularCommutationReport comm = check_modular_commutation(mod, gens, g);
    CHECK(comm.commutation_residual <= 1e-9);
    CHECK(comm.self_adjoint_residual <= 1e-10);
    CHECK(comm.s_commutation_residual <= 1e-10);
  }
}
