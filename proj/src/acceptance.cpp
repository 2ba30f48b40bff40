#include "qlab/acceptance.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "qlab/dynamics.hpp"
#include "qlab/gibbs.hpp"
#include "qlab/lindblad.hpp"
#include "qlab/modular.hpp"
#include "qlab/qdb.hpp"
#include "qlab/spectral.hpp"

namespace qlab {

namespace {

struct Fixture {
  std::string name;
  GibbsState gibbs;
  GeneratorPair gens;
};

Matrix random_ginibre(std::mt19937_64& rng, Index d) {
  std::normal_distribution<double> nd;
  Matrix m(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) m(i, j) = Complex(nd(rng), nd(rng));
  return m;
}

SpectrumSpec random_condition_A_spectrum(std::mt19937_64& rng, Index d) {
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int attempt = 0; attempt < 500; ++attempt) {
    RealVector e(d);
    for (Index k = 0; k < d; ++k) e[k] = u(rng);
    std::sort(e.data(), e.data() + d);
    RealVector rho(d);
    double sum = 0.0;
    for (Index k = 0; k < d; ++k) {
      rho[k] = std::exp(-e[k]);
      sum += rho[k];
    }
    rho /= sum;
    SpectrumSpec spec(rho);
    if (check_condition_A(spec).holds) return spec;
  }
  throw InternalError("acceptance: failed to sample a Condition (A) spectrum");
}

RealMatrix random_k_upper(std::mt19937_64& rng, Index d) {
  std::uniform_real_distribution<double> u(0.2, 1.5);
  RealMatrix k = RealMatrix::Zero(d, d);
  for (Index r = 0; r < d; ++r)
    for (Index rp = r; rp < d; ++rp) k(r, rp) = u(rng);
  return k;
}

/// Gibbs state whose spectrum is exactly the given one: H = -ln rho, tau = 1.
GibbsState gibbs_from_spectrum(const SpectrumSpec& spec) {
  Matrix h = Matrix::Zero(spec.dim, spec.dim);
  for (Index k = 0; k < spec.dim; ++k) h(k, k) = -std::log(spec.rho_s[k]);
  return make_gibbs(HermitianOperator(h), 1.0);
}

Fixture synthesized_fixture(std::mt19937_64& rng, Index d, const std::string& name) {
  SpectrumSpec spec = random_condition_A_spectrum(rng, d);
  GibbsState gibbs = gibbs_from_spectrum(spec);
  RealMatrix upper = random_k_upper(rng, d);
  BohrTable bohr = BohrTable::build(spec);
  QdbJumpFamily fam = synthesize(gibbs, upper, 2 * bohr.positive_count + 1);
  GeneratorPair gens = build_generators(gibbs.hamiltonian(), fam.jumps);
  return Fixture{name, std::move(gibbs), std::move(gens)};
}

struct ThermalQubit {
  Fixture fixture;
  double gamma_down, gamma_up;
};

ThermalQubit thermal_qubit_fixture(double gamma_down) {
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = 1.0;
  HermitianOperator H(h);
  GibbsState gibbs = make_gibbs(H, 1.0);
  double gamma_up = gamma_down * gibbs.spectrum()[1] / gibbs.spectrum()[0];
  Matrix lower = Matrix::Zero(2, 2), raise = Matrix::Zero(2, 2);
  lower(0, 1) = std::sqrt(gamma_down);
  raise(1, 0) = std::sqrt(gamma_up);
  JumpOperatorSet jumps({lower, raise});
  return ThermalQubit{Fixture{"thermal-qubit", gibbs, build_generators(H, jumps)}, gamma_down,
                      gamma_up};
}

Fixture sigma_x_control() {
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = 1.0;
  HermitianOperator H(h);
  Matrix sx(2, 2);
  sx << 0, 1, 1, 0;
  return Fixture{"sigma-x-control", make_gibbs(H, 1.0), build_generators(H, JumpOperatorSet({sx}))};
}

/// Two decoupled thermal qubits side by side: commutant dimension >= 2.
Fixture block_diagonal_fixture() {
  Matrix h = Matrix::Zero(4, 4);
  h(1, 1) = 1.0;
  h(2, 2) = 0.35;
  h(3, 3) = 1.75;
  HermitianOperator H(h);
  GibbsState gibbs = make_gibbs(H, 1.0);
  auto thermal_block = [&](Index a, Index b, double gd) {
    double ratio = std::exp(-(h(b, b).real() - h(a, a).real()));  // rho_b / rho_a at tau = 1
    Matrix lower = Matrix::Zero(4, 4), raise = Matrix::Zero(4, 4);
    lower(a, b) = std::sqrt(gd);
    raise(b, a) = std::sqrt(gd * ratio);
    return std::vector<Matrix>{lower, raise};
  };
  std::vector<Matrix> ws = thermal_block(0, 1, 0.9);
  std::vector<Matrix> ws2 = thermal_block(2, 3, 0.6);
  ws.insert(ws.end(), ws2.begin(), ws2.end());
  return Fixture{"block-diagonal", gibbs, build_generators(H, JumpOperatorSet(ws))};
}

Matrix probe_state(Index d) {
  Matrix rho = Matrix::Zero(d, d);
  rho(0, 0) = 1.0;
  return rho;
}

Matrix probe_observable(Index d) {
  Matrix a = Matrix::Zero(d, d);
  a(0, 1) = 1.0;
  a(1, 0) = 1.0;
  for (Index k = 0; k < d; ++k) a(k, k) = static_cast<double>(k) / static_cast<double>(d);
  return a;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << v;
  return os.str();
}

}  // namespace

bool AcceptanceSummary::all_passed() const {
  for (const CriterionResult& r : results)
    if (!r.pass) return false;
  return true;
}

AcceptanceSummary run_acceptance(const AcceptanceOptions& opts) {
  AcceptanceSummary summary;
  std::mt19937_64 rng(opts.seed);
  const double ts = opts.tol_scale;

  // shared fixtures
  std::vector<Fixture> core;  // one synthesized family per dimension
  for (Index d : opts.dims) core.push_back(synthesized_fixture(rng, d, "synthesized"));
  ThermalQubit thermal = thermal_qubit_fixture(0.8);
  if (opts.mutation == Mutation::SignFlipG) {
    thermal.fixture.gens.G.mat = -thermal.fixture.gens.G.mat;
    thermal.fixture.gens.Gp.mat = -thermal.fixture.gens.Gp.mat;
    thermal.fixture.gens.L.mat = thermal.fixture.gens.L0.mat + thermal.fixture.gens.G.mat;
    thermal.fixture.gens.Lp.mat = thermal.fixture.gens.L0p.mat + thermal.fixture.gens.Gp.mat;
  }
  Fixture control = sigma_x_control();
  Fixture blocks = block_diagonal_fixture();

  std::vector<const Fixture*> qdb_fixtures;
  for (const Fixture& f : core) qdb_fixtures.push_back(&f);
  qdb_fixtures.push_back(&thermal.fixture);
  qdb_fixtures.push_back(&blocks);

  // 1. QDB synthesis exactness
  {
    double worst = 0.0;
    double worst_stationarity = 0.0;
    for (Index d : opts.dims) {
      for (int trial = 0; trial < 20; ++trial) {
        SpectrumSpec spec = random_condition_A_spectrum(rng, d);
        GibbsState gibbs = gibbs_from_spectrum(spec);
        BohrTable bohr = BohrTable::build(spec);
        QdbJumpFamily fam = synthesize(gibbs, random_k_upper(rng, d), 2 * bohr.positive_count + 1);
        GeneratorPair gens = build_generators(gibbs.hamiltonian(), fam.jumps);
        QdbReport rep = verify_qdb(gibbs.rho(), gens);
        worst = std::max(worst, rep.residual / rep.scale);
        worst_stationarity =
            std::max(worst_stationarity, gens.L.apply(gibbs.rho().matrix()).norm());
      }
    }
    summary.results.push_back({1, "QDB synthesis exactness", worst <= 1e-10 * ts,
                               "max relative residual " + fmt(worst)});
    // 2. Gibbs stationarity (same synthesized population)
    summary.results.push_back({2, "Gibbs stationarity L(rho_tau) = 0",
                               worst_stationarity <= 1e-11 * ts,
                               "max ||L(rho_tau)||_F " + fmt(worst_stationarity)});
  }

  // 3. Structure theorem
  {
    double worst = 0.0;
    std::string violation;
    for (const Fixture* f : qdb_fixtures) {
      StructureReport st = structure_check(f->gens, f->gibbs);
      for (double v : {st.gp_self_adjoint, st.gp_max_eigenvalue, st.l0p_anti, st.g_self_adjoint,
                       st.g_max_eigenvalue, st.commutation, st.gp_tau1_symmetric})
        worst = std::max(worst, v);
      if (!st.violations.empty() && violation.empty())
        violation = "structure-violation: " + st.violations.front() + " on " + f->name;
    }
    StructureReport neg = structure_check(control.gens, control.gibbs);
    bool control_fails = neg.gp_self_adjoint > 1e-3;
    bool pass = worst <= 1e-9 * ts && control_fails;
    std::string detail = "max residual " + fmt(worst) + ", control residual " +
                         fmt(neg.gp_self_adjoint);
    if (!violation.empty()) detail += "; " + violation;
    summary.results.push_back({3, "structure theorem (self-adjointness, sign, commutation)", pass,
                               detail});
  }

  // 4. Splitting theorem
  {
    double worst = 0.0;
    for (const Fixture* f : qdb_fixtures)
      for (double t : {0.3, 1.0, 3.0}) {
        Matrix exact = expm(t * f->gens.Lp.mat);
        Matrix split = expm(t * f->gens.L0p.mat) * expm(t * f->gens.Gp.mat);
        worst = std::max(worst, (exact - split).norm() / std::max(1.0, exact.norm()));
      }
    double neg = 0.0;
    {
      double t = 0.7;
      Matrix exact = expm(t * control.gens.Lp.mat);
      Matrix split = expm(t * control.gens.L0p.mat) * expm(t * control.gens.Gp.mat);
      neg = (exact - split).norm() / std::max(1.0, exact.norm());
    }
    bool pass = worst <= 1e-9 * ts && neg > 1e-4;
    summary.results.push_back({4, "splitting e^{L't} = e^{L0't} e^{G't}", pass,
                               "max QDB residual " + fmt(worst) + ", control " + fmt(neg)});
  }

  // 5. Null-space lemma
  {
    double worst = 0.0;
    for (const Fixture* f : qdb_fixtures) {
      NullSpacesReport rep = null_spaces(f->gens, f->gibbs);
      worst = std::max(worst, rep.intersection_residual);
    }
    summary.results.push_back({5, "Null(L) = Null(G) /\\ Null(L0)", worst <= 1e-9 * ts,
                               "max projector residual " + fmt(worst)});
  }

  // 6. Ergodic theorem with the 2/T envelope, three metrics
  {
    bool pass = true;
    double worst_ratio = 0.0;
    std::string why;
    for (const Fixture* f : qdb_fixtures) {
      Matrix rho0 = probe_state(f->gibbs.dim());
      Matrix a0 = probe_observable(f->gibbs.dim());
      ErgodicTable table =
          ergodic_limit_check(f->gens, f->gibbs, rho0, a0, {10.0, 20.0, 40.0, 80.0});
      if (!table.bounds_hold) {
        pass = false;
        why = "envelope violated on " + f->name;
      }
      for (double r : {table.tail_ratio_state, table.tail_ratio_tau1, table.tail_ratio_tau})
        worst_ratio = std::max(worst_ratio, r);
    }
    if (worst_ratio > 0.3) {
      pass = false;
      if (why.empty()) why = "tail ratio err(80)/err(20) = " + fmt(worst_ratio);
    }
    summary.results.push_back({6, "ergodic averages: 2/T envelope and tail decay", pass,
                               why.empty() ? "max tail ratio " + fmt(worst_ratio) : why});
  }

  // 7. Uniqueness chain
  {
    bool pass = true;
    std::string detail;
    for (const Fixture* f : qdb_fixtures) {
      if (f == &blocks) continue;
      CommutantReport comm = commutant(f->gens.jumps, f->gibbs.dim());
      NullSpacesReport nulls = null_spaces(f->gens, f->gibbs);
      if (comm.dim != 1) {
        pass = false;
        detail = "commutant dim " + std::to_string(comm.dim) + " on " + f->name;
        break;
      }
      if (nulls.null_L.dim != 1) {
        pass = false;
        detail = "null dim " + std::to_string(nulls.null_L.dim) + " on " + f->name;
        break;
      }
      WeightedMetric s_tau = WeightedMetric::s_tau(f->gibbs);
      Matrix p = metric_projector(nulls.null_L, s_tau);
      Matrix rho0 = probe_state(f->gibbs.dim());
      Matrix limit_state = unvec(Vector(p * vec(rho0)));
      double err_state = (limit_state - f->gibbs.rho().matrix()).norm();
      WeightedMetric b_tau1 = WeightedMetric::b_tau_1(f->gibbs);
      KernelResult kp = metric_kernel(f->gens.Lp, b_tau1);
      Matrix pp = metric_projector(kp, b_tau1);
      Matrix a0 = probe_observable(f->gibbs.dim());
      Matrix limit_obs = unvec(Vector(pp * vec(a0)));
      Complex ca = (a0 * f->gibbs.rho().matrix()).trace();
      Matrix expected = ca * Matrix::Identity(f->gibbs.dim(), f->gibbs.dim());
      double err_obs = (limit_obs - expected).norm();
      if (err_state > 1e-8 * ts || err_obs > 1e-8 * ts) {
        pass = false;
        detail = "limit errors " + fmt(err_state) + " / " + fmt(err_obs) + " on " + f->name;
        break;
      }
    }
    CommutantReport bc = commutant(blocks.gens.jumps, 4);
    NullSpacesReport bn = null_spaces(blocks.gens, blocks.gibbs);
    if (bc.dim < 2 || bn.null_L.dim < 2) {
      pass = false;
      detail = "block fixture: commutant dim " + std::to_string(bc.dim) + ", null dim " +
               std::to_string(bn.null_L.dim);
    }
    if (detail.empty())
      detail = "commutant dim 1 <=> unique stationary state; block fixture degenerate as expected";
    summary.results.push_back({7, "uniqueness chain under Condition (U)", pass, detail});
  }

  // 8. Gap decay in three norms + thermal-qubit gap oracle
  {
    bool pass = true;
    std::string detail;
    for (const Fixture* f : qdb_fixtures) {
      Matrix rho0 = probe_state(f->gibbs.dim());
      Matrix a0 = probe_observable(f->gibbs.dim());
      DecayTable table = gap_decay_check(f->gens, f->gibbs, {0.5, 1.0, 2.0, 4.0}, rho0, a0);
      if (!table.hypothesis_met) {
        pass = false;
        detail = "hypothesis unexpectedly unmet on " + f->name;
        break;
      }
      if (!table.bounds_hold) {
        pass = false;
        detail = "decay envelope violated on " + f->name;
        break;
      }
    }
    SpectralReport spec = spectral_report(thermal.fixture.gens, thermal.fixture.gibbs);
    double theta_oracle = 0.5 * (thermal.gamma_down + thermal.gamma_up);
    double gap_err = std::abs(spec.gap_theta - theta_oracle) / std::max(1.0, theta_oracle);
    if (gap_err > 1e-10 * ts) {
      pass = false;
      detail = "thermal qubit gap " + fmt(spec.gap_theta) + " vs oracle " + fmt(theta_oracle);
    }
    if (detail.empty()) detail = "theta(thermal qubit) = (gamma_down + gamma_up)/2, err " + fmt(gap_err);
    summary.results.push_back({8, "spectral-gap exponential decay", pass, detail});
  }

  // 9. Complete positivity via the Choi matrix
  {
    double worst = 0.0;
    for (const Fixture* f : qdb_fixtures)
      for (double t : {0.1, 1.0, 10.0}) {
        SuperOperator flow{f->gens.dim(), expm(t * f->gens.L.mat)};
        ChoiReport rep = choi_matrix(flow);
        worst = std::max(worst, -rep.min_eigenvalue / std::max(1.0, rep.scale));
      }
    // transpose map control at d = 2: Choi is the swap, min eigenvalue -1
    Matrix swap = Matrix::Zero(4, 4);
    swap(0, 0) = swap(3, 3) = 1.0;
    swap(1, 2) = swap(2, 1) = 1.0;  // transpose superoperator in vec coordinates
    ChoiReport tr_rep = choi_matrix(SuperOperator{2, swap});
    bool control_not_cp = !tr_rep.completely_positive && tr_rep.min_eigenvalue < -0.5;
    bool pass = worst <= 1e-9 * ts && control_not_cp;
    summary.results.push_back({9, "complete positivity of e^{tL}", pass,
                               "worst Choi deficit " + fmt(worst) + "; transpose map min eig " +
                                   fmt(tr_rep.min_eigenvalue)});
  }

  // 10. Trotter first-order convergence
  {
    Matrix rho0 = Matrix::Zero(2, 2);
    rho0(0, 0) = 0.25;
    rho0(1, 1) = 0.75;
    rho0(0, 1) = rho0(1, 0) = 0.2;
    const double t = 1.0;
    HermitianOperator H(thermal.fixture.gens.H);
    Matrix exact = evolve_exact(thermal.fixture.gens, rho0, t, Side::State);
    auto err = [&](int n) {
      return (evolve_trotter(H, thermal.fixture.gens.jumps, rho0, t, n) - exact).norm();
    };
    double r1 = err(32) / err(64);
    double r2 = err(64) / err(128);
    bool pass = r1 >= 1.6 && r1 <= 2.4 && r2 >= 1.6 && r2 <= 2.4;
    summary.results.push_back({10, "Trotter product first-order convergence", pass,
                               "error ratios " + fmt(r1) + ", " + fmt(r2)});
  }

  // 11. Stochastic duality + determinism
  {
    Vector psi0(2);
    psi0 << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    Matrix sz(2, 2);
    sz << 1, 0, 0, -1;
    HermitianOperator H(thermal.fixture.gens.H);
    TrajectoryEnsemble a =
        unravel(H, thermal.fixture.gens.jumps, psi0, 1.0, 1e-3, 20000, opts.seed, sz);
    TrajectoryEnsemble b =
        unravel(H, thermal.fixture.gens.jumps, psi0, 1.0, 1e-3, 20000, opts.seed, sz);
    Matrix rho0 = psi0 * psi0.adjoint();
    double exact =
        (sz * evolve_exact(thermal.fixture.gens, rho0, 1.0, Side::State)).trace().real();
    double gap = std::abs(a.mean - exact);
    double budget = (4.0 * a.std_error + 5.0 * a.dt) * ts;
    bool deterministic = (a.mean == b.mean) && (a.std_error == b.std_error);
    bool pass = gap <= budget && deterministic;
    summary.results.push_back({11, "stochastic unraveling duality, bit-stable seeding", pass,
                               "|MC - exact| " + fmt(gap) + " vs budget " + fmt(budget) +
                                   (deterministic ? "" : "; rerun differed")});
  }

  // 12. Modular machinery
  {
    double worst = 0.0;
    std::mt19937_64 mrng(opts.seed ^ 0xabcdULL);
    std::normal_distribution<double> nd;
    for (const Fixture* f : qdb_fixtures) {
      ModularData mod = build_modular(f->gibbs);
      worst = std::max(worst, (mod.L_tau.mat * mod.omega).norm());
      worst = std::max(worst, (modular_conjugation(mod.omega) - mod.omega).norm());
      const Index d = f->gibbs.dim();
      for (int trial = 0; trial < 10; ++trial) {
        Matrix A(d, d);
        for (Index i = 0; i < d; ++i)
          for (Index j = 0; j < d; ++j) A(i, j) = Complex(nd(mrng), nd(mrng));
        worst = std::max(worst, check_S_operator(mod, A));
        Vector v = vec(A);
        worst = std::max(worst,
                         (modular_conjugation(modular_conjugation(v)) - v).norm() / v.norm());
      }
      ModularCommutationReport comm = check_modular_commutation(mod, f->gens, f->gibbs);
      worst = std::max(worst, comm.commutation_residual);
      worst = std::max(worst, comm.self_adjoint_residual);
      worst = std::max(worst, comm.s_commutation_residual);
    }
    summary.results.push_back({12, "GNS/modular identities (S, L_tau, J, [G'^, e^{-L_tau}])",
                               worst <= 1e-9 * ts, "max residual " + fmt(worst)});
  }

  // 13. Norm and duality inequalities
  {
    double worst_slack = 0.0;  // most negative slack, reported positive
    for (const Fixture* f : {&thermal.fixture, &core.back()}) {
      const Index d = f->gibbs.dim();
      WeightedMetric s_tau = WeightedMetric::s_tau(f->gibbs);
      WeightedMetric s_tau_t = WeightedMetric::s_tau_transpose(f->gibbs);
      WeightedMetric b_tau = WeightedMetric::b_tau(f->gibbs);
      WeightedMetric b_tau1 = WeightedMetric::b_tau_1(f->gibbs);
      double tr_rho = f->gibbs.rho().matrix().trace().real();
      for (int trial = 0; trial < 100; ++trial) {
        Matrix lam = random_ginibre(rng, d);
        Matrix A = random_ginibre(rng, d);
        double viol = 0.0;
        viol = std::max(viol, schatten_norm(lam, 1.0) - s_tau.norm(lam) * std::sqrt(tr_rho));
        viol = std::max(viol, std::abs(coupling(A, lam)) - b_tau1.norm(A) * s_tau.norm(lam));
        viol = std::max(viol, std::abs(coupling(A, lam)) - b_tau.norm(A) * s_tau_t.norm(lam));
        double opn = schatten_norm(phi_apply(f->gens.jumps, A, Side::Observable),
                                   std::numeric_limits<double>::infinity());
        viol = std::max(viol, opn - schatten_norm(A, std::numeric_limits<double>::infinity()) *
                                        f->gens.jumps.Y_operator_norm());
        worst_slack = std::max(worst_slack, viol);
      }
    }
    summary.results.push_back({13, "norm and duality inequalities", worst_slack <= 1e-10 * ts,
                               "worst violation " + fmt(worst_slack)});
  }

  return summary;
}

bool print_acceptance(const AcceptanceSummary& summary, std::ostream& os) {
  for (const CriterionResult& r : summary.results) {
    os << "[" << std::setw(2) << r.id << "] " << (r.pass ? "PASS" : "FAIL") << " " << r.name;
    if (!r.detail.empty()) os << " (" << r.detail << ")";
    os << "\n";
  }
  os << (summary.all_passed() ? "acceptance: all criteria passed\n"
                              : "acceptance: FAILURES present\n");
  return summary.all_passed();
}

}  // namespace qlab
