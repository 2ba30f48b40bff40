#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "qlab/lindblad.hpp"

using namespace qlab;
using namespace qlab::test;

TEST_CASE("d = 1 generators vanish identically") {
  Matrix h(1, 1), w(1, 1);
  h(0, 0) = 2.3;
  w(0, 0) = Complex(0.7, -0.4);
  GeneratorPair gens = build_generators(HermitianOperator(h), JumpOperatorSet({w}));
  CHECK(gens.L.mat.norm() <= 1e-14);
}

TEST_CASE("empty jump set gives the closed system") {
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = 1.0;
  GeneratorPair gens = build_generators(HermitianOperator(h), JumpOperatorSet());
  CHECK(gens.G.mat.norm() == 0.0);
  CHECK((gens.L.mat - gens.L0.mat).norm() == 0.0);
}

TEST_CASE("hand-evaluated dissipator on the qubit") {
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = 1.0;
  GeneratorPair gens = build_generators(HermitianOperator(h), JumpOperatorSet({sigma_minus()}));
  Matrix rho = Matrix::Zero(2, 2);
  rho(1, 1) = 1.0;
  Matrix out = gens.L.apply(rho);
  Matrix expected(2, 2);
  expected << 1, 0, 0, -1;  // W rho W* - {W*W, rho}/2 with [H, rho] = 0
  CHECK((out - expected).norm() <= 1e-13);
}

TEST_CASE("generator pair structure and duality") {
  std::mt19937_64 rng(31);
  Matrix h = random_hermitian(rng, 3);
  JumpOperatorSet jumps({random_matrix(rng, 3), random_matrix(rng, 3)});
  GeneratorPair gens = build_generators(HermitianOperator(h), jumps);

  CHECK((gens.L.mat - gens.L0.mat - gens.G.mat).norm() <= 1e-14 * std::max(1.0, gens.L.mat.norm()));
  CHECK((gens.Lp.mat - gens.L0p.mat - gens.Gp.mat).norm() <=
        1e-14 * std::max(1.0, gens.Lp.mat.norm()));

  // Tr(A L(rho)) = Tr(L'(A) rho), for all four generator pieces
  for (int trial = 0; trial < 10; ++trial) {
    Matrix a = random_matrix(rng, 3), rho = random_matrix(rng, 3);
    auto dual_gap = [&](const SuperOperator& s, const SuperOperator& sp) {
      Complex lhs = (a * s.apply(rho)).trace();
      Complex rhs = (sp.apply(a) * rho).trace();
      return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
    };
    CHECK(dual_gap(gens.L, gens.Lp) <= 1e-10);
    CHECK(dual_gap(gens.L0, gens.L0p) <= 1e-10);
    CHECK(dual_gap(gens.G, gens.Gp) <= 1e-10);
  }

  // zero modes and trace preservation
  Matrix one = Matrix::Identity(3, 3);
  CHECK(gens.Lp.apply(one).norm() <= 1e-12 * std::max(1.0, gens.Lp.mat.norm()));
  CHECK(gens.Gp.apply(one).norm() <= 1e-12 * std::max(1.0, gens.Gp.mat.norm()));
  for (int trial = 0; trial < 100; ++trial) {
    Matrix rho = random_matrix(rng, 3);
    CHECK(std::abs(gens.L.apply(rho).trace()) <= 1e-11 * std::max(1.0, rho.norm()));
  }

  // Hermiticity preservation
  for (int trial = 0; trial < 10; ++trial) {
    Matrix rho = random_hermitian(rng, 3);
    Matrix lr = gens.L.apply(rho);
    CHECK((lr - lr.adjoint()).norm() <= 1e-12 * std::max(1.0, lr.norm()));
  }
}

TEST_CASE("phi_apply is completely positive and bounded") {
  std::mt19937_64 rng(32);
  JumpOperatorSet jumps({random_matrix(rng, 3), random_matrix(rng, 3)});

  CHECK((phi_apply(jumps, Matrix::Identity(3, 3), Side::Observable) - jumps.Y()).norm() <= 1e-13);

  JumpOperatorSet sm({sigma_minus()});
  Matrix rho = Matrix::Zero(2, 2);
  rho(1, 1) = 1.0;
  Matrix out = phi_apply(sm, rho, Side::State);
  CHECK(out(0, 0).real() == doctest::Approx(1.0));
  CHECK(std::abs(out(1, 1)) <= 1e-15);

  for (int trial = 0; trial < 20; ++trial) {
    Matrix x = random_psd(rng, 3);
    Matrix y = phi_apply(jumps, x, Side::Observable);
    Eigen::SelfAdjointEigenSolver<Matrix> es((y + y.adjoint()) / 2.0);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10 * std::max(1.0, y.norm()));
  }

  double ynorm = jumps.Y_operator_norm();
  for (int trial = 0; trial < 50; ++trial) {
    Matrix a = random_matrix(rng, 3);
    double lhs = schatten_norm(phi_apply(jumps, a, Side::Observable),
                               std::numeric_limits<double>::infinity());
    double rhs = schatten_norm(a, std::numeric_limits<double>::infinity()) * ynorm;
    CHECK(lhs <= rhs + 1e-10 * std::max(1.0, rhs));

    // operator Cauchy-Schwarz: Phi'(A)* Phi'(A) <= ||Y|| Phi'(A*A)
    Matrix pa = phi_apply(jumps, a, Side::Observable);
    Matrix gap = ynorm * phi_apply(jumps, Matrix(a.adjoint() * a), Side::Observable) -
                 pa.adjoint() * pa;
    Eigen::SelfAdjointEigenSolver<Matrix> es((gap + gap.adjoint()) / 2.0);
    CHECK(es.eigenvalues().minCoeff() >= -1e-9 * std::max(1.0, gap.norm()));
  }
}

TEST_CASE("dissipation function identities") {
  std::mt19937_64 rng(33);
  JumpOperatorSet jumps({random_matrix(rng, 3), random_matrix(rng, 3)});
  Matrix one = Matrix::Identity(3, 3);
  CHECK(dissipation(jumps, one, one).norm() <= 1e-13);

  // anything commuting with every W_j is annihilated
  Matrix c = 2.7 * one;
  CHECK(dissipation(jumps, c, c).norm() <= 1e-12);

  for (int trial = 0; trial < 10; ++trial) {
    Matrix a = random_matrix(rng, 3), b = random_matrix(rng, 3);
    Matrix lhs = dissipation(jumps, a, b);
    Matrix rhs = Matrix::Zero(3, 3);
    for (const Matrix& w : jumps.jumps()) {
      Matrix ca = w * a - a * w, cb = w * b - b * w;
      rhs += ca.adjoint() * cb;
    }
    CHECK((lhs - rhs).norm() <= 1e-11 * std::max(1.0, rhs.norm()));

    Matrix daa = dissipation(jumps, a, a);
    Eigen::SelfAdjointEigenSolver<Matrix> es((daa + daa.adjoint()) / 2.0);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10 * std::max(1.0, daa.norm()));
  }
}

TEST_CASE("gram form of G' agrees with the direct inner product under QDB") {
  std::mt19937_64 rng(34);
  GibbsState g = qubit_gibbs();
  JumpOperatorSet jumps = thermal_qubit_jumps(g, 0.9);

  Matrix one = Matrix::Identity(2, 2);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix a = random_matrix(rng, 2);
    GramFormResult r = gram_form_G(g, jumps, a, one);
    CHECK(std::abs(r.value) <= 1e-12);  // G'(1) = 0
  }
  for (int trial = 0; trial < 10; ++trial) {
    Matrix a = random_matrix(rng, 2), b = random_matrix(rng, 2);
    GramFormResult r = gram_form_G(g, jumps, a, b);
    CHECK(r.qdb_consistent);
    CHECK(std::abs(r.value - r.direct) <= 1e-11 * std::max(1.0, std::abs(r.value)));
    GramFormResult diag = gram_form_G(g, jumps, a, a);
    CHECK(diag.value.real() <= 1e-12);
    CHECK(std::abs(diag.value.imag()) <= 1e-12);
  }

  // non-QDB control: the two evaluations disagree
  JumpOperatorSet bad({sigma_x()});
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    Matrix a = random_matrix(rng, 2), b = random_matrix(rng, 2);
    GramFormResult r = gram_form_G(g, bad, a, b);
    worst = std::max(worst, r.discrepancy);
  }
  CHECK(worst > 1e-3);
}

TEST_CASE("prop 3.1 bound under QDB: ||G'A||_tau <= 2 ||Y|| ||A||_tau") {
  std::mt19937_64 rng(35);
  GibbsState g = qubit_gibbs();
  JumpOperatorSet jumps = thermal_qubit_jumps(g, 1.2);
  GeneratorPair gens = build_generators(g.hamiltonian(), jumps);
  WeightedMetric b0 = WeightedMetric::b_tau(g);
  double bound = 2.0 * jumps.Y_operator_norm();
  for (int trial = 0; trial < 50; ++trial) {
    Matrix a = random_matrix(rng, 2);
    CHECK(b0.norm(gens.Gp.apply(a)) <= bound * b0.norm(a) + 1e-10);
  }
}
