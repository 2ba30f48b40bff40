#include "qlab/scenario.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <random>
#include <sstream>

#include "qlab/dynamics.hpp"
#include "qlab/modular.hpp"
#include "qlab/spectral.hpp"

namespace qlab {

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& why) {
  throw InvalidParameter("config field '" + field + "': " + why);
}

double require_number(const Json& j, const std::string& field) {
  if (!j.contains(field) || !j[field].is_number()) config_error(field, "expected a number");
  return j[field].get<double>();
}

Complex read_complex(const Json& j, const std::string& field) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Complex(j[0].get<double>(), j[1].get<double>());
  config_error(field, "matrix entries must be numbers or [re, im] pairs");
}

Matrix read_matrix(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) config_error(field, "expected a non-empty array of rows");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j[0].size());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<Index>(j[i].size()) != cols)
      config_error(field, "rows of unequal length");
    for (Index k = 0; k < cols; ++k) m(i, k) = read_complex(j[i][k], field);
  }
  return m;
}

Json write_matrix(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
    rows.push_back(row);
  }
  return rows;
}

Matrix random_nondegenerate_hamiltonian(Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  for (int attempt = 0; attempt < 200; ++attempt) {
    Matrix g(d, d);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) g(i, j) = Complex(nd(rng), nd(rng));
    Matrix h = (g + g.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    double spread = es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
    double min_gap = spread;
    for (Index k = 1; k < d; ++k)
      min_gap = std::min(min_gap, es.eigenvalues()[k] - es.eigenvalues()[k - 1]);
    if (spread > 0.0 && min_gap > 0.05 * spread) return h;
  }
  throw InternalError("random-nondegenerate: no well-separated spectrum after 200 attempts");
}

std::vector<double> read_number_list(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) config_error(field, "expected a non-empty array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) config_error(field, "expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Matrix basis_state(Index d, Index k) {
  Matrix m = Matrix::Zero(d, d);
  m(k, k) = 1.0;
  return m;
}

}  // namespace

Json Tolerances::echo() const {
  Json j;
  j["qdb"] = qdb * scale;
  j["stationarity"] = stationarity * scale;
  j["structure"] = structure * scale;
  j["split"] = split * scale;
  j["decay_slack"] = decay_slack * scale;
  j["cp"] = cp * scale;
  j["null_residual"] = null_residual * scale;
  j["modular"] = modular * scale;
  j["scale"] = scale;
  return j;
}

double tolerance_scale_from_env() {
  const char* s = std::getenv("LAB_TOL_SCALE");
  if (!s) return 1.0;
  char* end = nullptr;
  double v = std::strtod(s, &end);
  if (end == s || !(v > 0.0)) return 1.0;
  return v;
}

ScenarioConfig ScenarioConfig::parse(const Json& j) {
  ScenarioConfig cfg;
  cfg.raw = j;

  if (!j.contains("kind") || !j["kind"].is_string()) config_error("kind", "required string");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "synthesize") cfg.kind = ScenarioKind::Synthesize;
  else if (kind == "verify") cfg.kind = ScenarioKind::Verify;
  else if (kind == "evolve") cfg.kind = ScenarioKind::Evolve;
  else if (kind == "ergodic") cfg.kind = ScenarioKind::Ergodic;
  else if (kind == "decay") cfg.kind = ScenarioKind::Decay;
  else if (kind == "unravel") cfg.kind = ScenarioKind::Unravel;
  else if (kind == "modular") cfg.kind = ScenarioKind::Modular;
  else if (kind == "full-report") cfg.kind = ScenarioKind::FullReport;
  else config_error("kind", "unknown kind '" + kind + "'");

  cfg.name = j.value("name", kind);

  if (!j.contains("dim") || !j["dim"].is_number_integer()) config_error("dim", "required integer");
  cfg.dim = j["dim"].get<Index>();
  if (cfg.dim < 2 || cfg.dim > 16) config_error("dim", "must lie in 2..16");

  if (!j.contains("hamiltonian")) config_error("hamiltonian", "required");
  const Json& h = j["hamiltonian"];
  if (h.contains("diag")) {
    std::vector<double> d = read_number_list(h["diag"], "hamiltonian.diag");
    if (static_cast<Index>(d.size()) != cfg.dim) config_error("hamiltonian.diag", "length != dim");
    Matrix m = Matrix::Zero(cfg.dim, cfg.dim);
    for (Index k = 0; k < cfg.dim; ++k) m(k, k) = d[static_cast<std::size_t>(k)];
    cfg.hamiltonian = m;
  } else if (h.contains("matrix")) {
    cfg.hamiltonian = read_matrix(h["matrix"], "hamiltonian.matrix");
    if (cfg.hamiltonian.rows() != cfg.dim) config_error("hamiltonian.matrix", "shape != dim x dim");
  } else if (h.contains("random-nondegenerate")) {
    std::uint64_t s = h["random-nondegenerate"].value("seed", 1);
    cfg.hamiltonian = random_nondegenerate_hamiltonian(cfg.dim, s);
  } else {
    config_error("hamiltonian", "expected one of: diag, matrix, random-nondegenerate");
  }

  cfg.tau = require_number(j, "tau");
  if (!(cfg.tau > 0.0)) config_error("tau", "must be positive");

  if (!j.contains("jumps")) config_error("jumps", "required");
  const Json& jj = j["jumps"];
  if (jj.contains("explicit")) {
    if (!jj["explicit"].is_array()) config_error("jumps.explicit", "expected an array of matrices");
    for (const auto& w : jj["explicit"]) {
      Matrix m = read_matrix(w, "jumps.explicit");
      if (m.rows() != cfg.dim || m.cols() != cfg.dim)
        config_error("jumps.explicit", "jump operator shape != dim x dim");
      cfg.explicit_jumps.push_back(std::move(m));
    }
  } else if (jj.contains("qdb-synthesized")) {
    const Json& q = jj["qdb-synthesized"];
    if (!q.contains("K_upper")) config_error("jumps.qdb-synthesized.K_upper", "required");
    Matrix ku = read_matrix(q["K_upper"], "jumps.qdb-synthesized.K_upper");
    if (ku.rows() != cfg.dim || ku.cols() != cfg.dim)
      config_error("jumps.qdb-synthesized.K_upper", "shape != dim x dim");
    if (ku.imag().norm() != 0.0) config_error("jumps.qdb-synthesized.K_upper", "must be real");
    cfg.k_upper = ku.real();
    cfg.jump_count = q.value("m", -1);
  } else if (jj.contains("preset")) {
    cfg.preset = jj["preset"].get<std::string>();
    if (cfg.preset == "thermal-qubit") {
      if (cfg.dim != 2) config_error("jumps.preset", "thermal-qubit requires dim = 2");
      cfg.preset_rates = {jj.value("gamma_down", 1.0)};
    } else if (cfg.preset == "dephasing") {
      if (jj.contains("gamma")) {
        if (jj["gamma"].is_number())
          cfg.preset_rates.assign(static_cast<std::size_t>(cfg.dim), jj["gamma"].get<double>());
        else
          cfg.preset_rates = read_number_list(jj["gamma"], "jumps.gamma");
      } else {
        cfg.preset_rates.assign(static_cast<std::size_t>(cfg.dim), 1.0);
      }
      if (static_cast<Index>(cfg.preset_rates.size()) != cfg.dim)
        config_error("jumps.gamma", "length != dim");
    } else {
      config_error("jumps.preset", "unknown preset '" + cfg.preset + "'");
    }
  } else {
    config_error("jumps", "expected one of: explicit, qdb-synthesized, preset");
  }

  if (j.contains("times")) cfg.times = read_number_list(j["times"], "times");
  if (j.contains("T_list")) cfg.T_list = read_number_list(j["T_list"], "T_list");
  if (j.contains("samples")) cfg.decay_samples = read_number_list(j["samples"], "samples");
  if (j.contains("t")) cfg.t_final = require_number(j, "t");
  if (j.contains("dt")) cfg.dt = require_number(j, "dt");
  if (j.contains("paths")) {
    if (!j["paths"].is_number_integer()) config_error("paths", "expected an integer");
    cfg.paths = j["paths"].get<int>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) config_error("seed", "expected an integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("initial_state")) cfg.initial_state = read_matrix(j["initial_state"], "initial_state");
  if (j.contains("observable")) {
    if (j["observable"].is_object() && j["observable"].contains("pauli")) {
      std::string p = j["observable"]["pauli"].get<std::string>();
      if (cfg.dim != 2) config_error("observable.pauli", "requires dim = 2");
      Matrix m(2, 2);
      if (p == "x") m << 0, 1, 1, 0;
      else if (p == "y") m << 0, Complex(0, -1), Complex(0, 1), 0;
      else if (p == "z") m << 1, 0, 0, -1;
      else config_error("observable.pauli", "expected x, y or z");
      cfg.observable = m;
    } else {
      cfg.observable = read_matrix(j["observable"], "observable");
    }
  }

  cfg.tol.scale = tolerance_scale_from_env();
  if (j.contains("tolerances")) {
    const Json& t = j["tolerances"];
    if (!t.is_object()) config_error("tolerances", "expected an object");
    cfg.tol.qdb = t.value("qdb", cfg.tol.qdb);
    cfg.tol.stationarity = t.value("stationarity", cfg.tol.stationarity);
    cfg.tol.structure = t.value("structure", cfg.tol.structure);
    cfg.tol.split = t.value("split", cfg.tol.split);
    cfg.tol.decay_slack = t.value("decay_slack", cfg.tol.decay_slack);
    cfg.tol.cp = t.value("cp", cfg.tol.cp);
    cfg.tol.null_residual = t.value("null_residual", cfg.tol.null_residual);
    cfg.tol.modular = t.value("modular", cfg.tol.modular);
  }
  return cfg;
}

Model build_model(const ScenarioConfig& cfg) {
  HermitianOperator H(cfg.hamiltonian);
  GibbsState gibbs = make_gibbs(H, cfg.tau);

  std::optional<QdbJumpFamily> family;
  JumpOperatorSet jumps;
  if (!cfg.explicit_jumps.empty()) {
    jumps = JumpOperatorSet(cfg.explicit_jumps);
  } else if (cfg.k_upper) {
    int m = cfg.jump_count;
    if (m < 0) {
      BohrTable bohr = BohrTable::build(SpectrumSpec::from_gibbs(gibbs));
      m = 2 * bohr.positive_count + 1;
    }
    family = synthesize(gibbs, *cfg.k_upper, m);
    jumps = family->jumps;
  } else if (cfg.preset == "thermal-qubit") {
    const RealVector& rho = gibbs.spectrum();
    double gamma_down = cfg.preset_rates[0];
    double gamma_up = gamma_down * rho[1] / rho[0];  // cocycle at this tau
    Matrix lower = Matrix::Zero(2, 2), raise = Matrix::Zero(2, 2);
    lower(0, 1) = std::sqrt(gamma_down);
    raise(1, 0) = std::sqrt(gamma_up);
    const Matrix& V = gibbs.basis();
    jumps = JumpOperatorSet({V * lower * V.adjoint(), V * raise * V.adjoint()});
  } else if (cfg.preset == "dephasing") {
    std::vector<Matrix> ws;
    const Matrix& V = gibbs.basis();
    for (Index r = 0; r < cfg.dim; ++r) {
      Matrix p = Matrix::Zero(cfg.dim, cfg.dim);
      p(r, r) = std::sqrt(cfg.preset_rates[static_cast<std::size_t>(r)]);
      ws.push_back(V * p * V.adjoint());
    }
    jumps = JumpOperatorSet(std::move(ws));
  }
  // empty jump sets are allowed: closed-system scenarios
  return Model{gibbs, build_generators(H, jumps), std::move(family)};
}

bool RunReport::failed() const {
  for (const CheckLine& c : checks)
    if (c.status == "FAIL") return true;
  return false;
}

Json RunReport::to_json(const Json& scenario_echo, const Json& tol_echo) const {
  Json j;
  j["name"] = name;
  j["scenario"] = scenario_echo;
  j["tolerances"] = tol_echo;
  Json cs = Json::array();
  for (const CheckLine& c : checks) {
    Json cj;
    cj["name"] = c.name;
    cj["status"] = c.status;
    cj["residual"] = c.residual;
    cj["tolerance"] = c.tolerance;
    if (!c.detail.empty()) cj["detail"] = c.detail;
    cs.push_back(cj);
  }
  j["checks"] = cs;
  j["values"] = values;
  j["artifacts"] = artifacts;
  return j;
}

namespace {

CheckLine check_against(const std::string& name, double residual, double tol,
                        const std::string& detail = "") {
  CheckLine c;
  c.name = name;
  c.residual = residual;
  c.tolerance = tol;
  c.status = (residual <= tol) ? "PASS" : "FAIL";
  c.detail = detail;
  return c;
}

Matrix default_initial_state(const ScenarioConfig& cfg) {
  if (cfg.initial_state.size() > 0) {
    if (cfg.initial_state.rows() != cfg.dim) config_error("initial_state", "shape != dim x dim");
    return cfg.initial_state;
  }
  return basis_state(cfg.dim, 0);
}

Matrix default_observable(const ScenarioConfig& cfg) {
  if (cfg.observable.size() > 0) {
    if (cfg.observable.rows() != cfg.dim) config_error("observable", "shape != dim x dim");
    return cfg.observable;
  }
  Matrix a = Matrix::Zero(cfg.dim, cfg.dim);
  a(0, 0) = 1.0;  // ground-level population
  return a;
}

void write_series(const std::filesystem::path& path, const std::string& header,
                  const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
  out << header << "\n";
  out.precision(17);
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (k) out << ",";
      out << r[k];
    }
    out << "\n";
  }
}

void run_verify_checks(const ScenarioConfig& cfg, const Model& model, RunReport& rep) {
  const double s = cfg.tol.scale;
  QdbReport qdb = verify_qdb(model.gibbs.rho(), model.gens, cfg.tol.qdb * s);
  rep.checks.push_back(
      check_against("qdb-residual", qdb.residual, cfg.tol.qdb * s * qdb.scale));
  rep.checks.push_back(
      check_against("qdb-symmetry", qdb.symmetry_residual, cfg.tol.qdb * s * qdb.scale));
  double stat = model.gens.L.apply(model.gibbs.rho().matrix()).norm();
  rep.checks.push_back(check_against("gibbs-stationarity", stat, cfg.tol.stationarity * s));
  CoefficientTables tables = coefficient_tables(model.gens, model.gibbs);
  rep.checks.push_back(
      check_against("coefficient-balance", tables.balance_residual, cfg.tol.qdb * s * qdb.scale));
  rep.values["qdb_residual"] = qdb.residual;
  rep.values["qdb_scale"] = qdb.scale;
  rep.values["coefficient_balance"] = tables.balance_residual;
}

void run_structure_checks(const ScenarioConfig& cfg, const Model& model, RunReport& rep) {
  StructureReport st = structure_check(model.gens, model.gibbs);
  const double s = cfg.tol.scale;
  auto add = [&](const char* name, double v, double tol) {
    rep.checks.push_back(check_against(name, v, tol * s));
  };
  add("structure-gp-self-adjoint", st.gp_self_adjoint, 1e-9);
  add("structure-gp-negative", st.gp_max_eigenvalue, 1e-9);
  add("structure-l0p-anti", st.l0p_anti, 1e-9);
  add("structure-g-self-adjoint", st.g_self_adjoint, 1e-9);
  add("structure-g-negative", st.g_max_eigenvalue, 1e-9);
  add("structure-commutation", st.commutation, 1e-9);
  add("structure-gp-tau1-symmetric", st.gp_tau1_symmetric, 1e-9);
  if (!st.violations.empty()) {
    std::string names;
    for (const auto& v : st.violations) names += (names.empty() ? "" : ", ") + v;
    rep.checks.back().detail = "structure-violation: " + names;
  }
}

void run_evolve(const ScenarioConfig& cfg, const Model& model, RunReport& rep,
                const std::filesystem::path& out_dir, const std::string& series_name) {
  std::vector<double> times = cfg.times;
  if (times.empty()) {
    for (int k = 0; k <= 40; ++k) times.push_back(0.1 * k);
  }
  Matrix rho0 = default_initial_state(cfg);
  Matrix obs = default_observable(cfg);

  EvolutionResult traj = evolve_trajectory(model.gens, rho0, times, Side::State);
  std::vector<std::vector<double>> rows;
  double min_eig = 0.0;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const Matrix& rho_t = traj.states[k];
    Eigen::SelfAdjointEigenSolver<Matrix> es((rho_t + rho_t.adjoint()) / 2.0);
    double lo = es.eigenvalues().minCoeff();
    min_eig = std::min(min_eig, lo);
    rows.push_back({traj.times[k], rho_t.trace().real(), (obs * rho_t).trace().real(), lo});
  }
  write_series(out_dir / series_name, "t,trace,observable,min_eigenvalue", rows);
  rep.artifacts.push_back(series_name);
  const double s = cfg.tol.scale;
  rep.checks.push_back(check_against("trace-preservation", traj.max_trace_drift, 1e-9 * s));
  rep.checks.push_back(check_against("hermiticity", traj.max_hermiticity_defect, 1e-10 * s));
  rep.checks.push_back(check_against("positivity", -min_eig, 1e-9 * s));
  rep.values["final_trace"] = rows.back()[1];
  rep.values["final_observable"] = rows.back()[2];
}

void run_ergodic(const ScenarioConfig& cfg, const Model& model, RunReport& rep,
                 const std::filesystem::path& out_dir, const std::string& series_name) {
  std::vector<double> T_list = cfg.T_list.empty() ? std::vector<double>{10, 20, 40, 80} : cfg.T_list;
  Matrix rho0 = default_initial_state(cfg);
  Matrix a0 = default_observable(cfg);
  ErgodicTable table = ergodic_limit_check(model.gens, model.gibbs, rho0, a0, T_list);

  std::vector<std::vector<double>> rows;
  for (const ErgodicRow& r : table.rows)
    rows.push_back({r.T, r.err_state, r.bound_state, r.err_tau1, r.bound_tau1, r.err_tau, r.bound_tau});
  write_series(out_dir / series_name,
               "T,err_state,bound_state,err_tau1,bound_tau1,err_tau,bound_tau", rows);
  rep.artifacts.push_back(series_name);

  rep.checks.push_back(check_against("ergodic-envelope", table.bounds_hold ? 0.0 : 1.0, 0.5,
                                     "err(T) <= 2||(L^perp)^{-1} x0^perp|| / T in all three metrics"));
  rep.checks.push_back(check_against("ergodic-halving", table.halving_ok ? 0.0 : 1.0, 0.5,
                                     "err(2T) <= 0.75 err(T) on the largest doubling pair"));
  // quadrature cross-check at the first T
  Matrix closed = ergodic_average(model.gens, rho0, T_list.front(), Side::State);
  Matrix quad = ergodic_average_quadrature(model.gens, rho0, T_list.front(), Side::State, 64);
  double cross = (closed - quad).norm() / std::max(1.0, closed.norm());
  rep.checks.push_back(check_against("ergodic-quadrature-crosscheck", cross, 1e-8 * cfg.tol.scale));
  rep.values["tail_ratio_state"] = table.tail_ratio_state;
  rep.values["tail_ratio_tau1"] = table.tail_ratio_tau1;
  rep.values["tail_ratio_tau"] = table.tail_ratio_tau;
  rep.values["final_err_state"] = table.rows.back().err_state;
}

void run_decay(const ScenarioConfig& cfg, const Model& model, RunReport& rep,
               const std::filesystem::path& out_dir, const std::string& series_name) {
  std::vector<double> samples =
      cfg.decay_samples.empty() ? std::vector<double>{0.5, 1, 2, 4} : cfg.decay_samples;
  Matrix rho0 = default_initial_state(cfg);
  Matrix a0 = default_observable(cfg);
  DecayTable table = gap_decay_check(model.gens, model.gibbs, samples, rho0, a0);

  if (!table.hypothesis_met) {
    CheckLine c;
    c.name = "gap-decay";
    c.status = "SKIP";
    c.detail = table.status;
    rep.checks.push_back(c);
    rep.values["gap_theta"] = table.theta;
    return;
  }

  WeightedMetric s_tau = WeightedMetric::s_tau(model.gibbs);
  double norm0 = s_tau.norm(rho0);
  std::vector<std::vector<double>> rows;
  for (const DecayRow& r : table.rows)
    rows.push_back({r.t, r.err_state, r.err_dual, r.err_state_T, r.envelope * norm0});
  write_series(out_dir / series_name, "t,distance_st,distance_dual,distance_st_transpose,envelope",
               rows);
  rep.artifacts.push_back(series_name);

  rep.checks.push_back(check_against("gap-decay-envelope", table.bounds_hold ? 0.0 : 1.0, 0.5,
                                     "||beta_t x0 - Q x0|| <= (1+eps) e^{-theta t} ||x0||"));
  rep.values["gap_theta"] = table.theta;
  rep.values["zero_simple"] = table.zero_simple;
  rep.values["fitted_prefactor"] = table.fitted_prefactor;
  rep.values["spectral_note"] = table.spectral_note;
  rep.values["final_distance_st"] = table.rows.back().err_state;
}

void run_unravel(const ScenarioConfig& cfg, const Model& model, RunReport& rep) {
  Matrix obs = default_observable(cfg);
  Vector psi0 = Vector::Zero(cfg.dim);
  psi0[0] = 1.0;
  if (cfg.initial_state.size() > 0) {
    // accept a pure state given as a density matrix: take the top eigenvector
    Eigen::SelfAdjointEigenSolver<Matrix> es(cfg.initial_state);
    psi0 = es.eigenvectors().col(cfg.dim - 1);
  }
  HermitianOperator H(cfg.hamiltonian);
  TrajectoryEnsemble ens =
      unravel(H, model.gens.jumps, psi0, cfg.t_final, cfg.dt, cfg.paths, cfg.seed, obs);

  Matrix rho0 = psi0 * psi0.adjoint();
  Matrix rho_t = evolve_exact(model.gens, rho0, cfg.t_final, Side::State);
  double exact = (obs * rho_t).trace().real();
  double gap = std::abs(ens.mean - exact);
  double budget = 4.0 * ens.std_error + 5.0 * ens.dt;
  rep.checks.push_back(check_against("stochastic-duality", gap, budget * cfg.tol.scale,
                                     "|MC mean - Tr(A beta_t rho0)| <= 4 SE + 5 dt"));
  if (ens.stability_warning) {
    CheckLine warn;
    warn.name = "sde-stability";
    warn.status = "SKIP";
    warn.detail = "stability-warning: dt * ||Y|| > 0.1";
    rep.checks.push_back(warn);
  }
  rep.values["mc_mean"] = ens.mean;
  rep.values["mc_std_error"] = ens.std_error;
  rep.values["exact_expectation"] = exact;
  rep.values["paths"] = ens.paths;
  rep.values["dt"] = ens.dt;
  rep.values["seed"] = ens.seed;
  rep.values["sde_drift"] = "-iH - Y/2 (dissipative; dual to the master equation)";
}

void run_modular(const ScenarioConfig& cfg, const Model& model, RunReport& rep) {
  ModularData mod = build_modular(model.gibbs);
  const double s = cfg.tol.scale;

  double l_tau_omega = (mod.L_tau.mat * mod.omega).norm();
  rep.checks.push_back(check_against("modular-L-tau-omega", l_tau_omega, 1e-12 * s));
  Vector j2 = modular_conjugation(modular_conjugation(mod.omega));
  rep.checks.push_back(check_against("modular-J-squared", (j2 - mod.omega).norm(), 1e-14 * s));
  rep.checks.push_back(check_against(
      "modular-J-omega", (modular_conjugation(mod.omega) - mod.omega).norm(), 1e-12 * s));
  rep.checks.push_back(check_against("modular-covariance", mod.covariance_residual, 1e-10 * s));

  std::mt19937_64 rng(cfg.seed ^ 0xfeedULL);
  std::normal_distribution<double> nd;
  double worst_s = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Matrix A(cfg.dim, cfg.dim);
    for (Index i = 0; i < cfg.dim; ++i)
      for (Index j = 0; j < cfg.dim; ++j) A(i, j) = Complex(nd(rng), nd(rng));
    worst_s = std::max(worst_s, check_S_operator(mod, A));
  }
  rep.checks.push_back(check_against("modular-S-operator", worst_s, 1e-10 * s));

  ModularCommutationReport comm = check_modular_commutation(mod, model.gens, model.gibbs);
  rep.checks.push_back(
      check_against("modular-G-hat-commutation", comm.commutation_residual, cfg.tol.modular * s));
  rep.checks.push_back(
      check_against("modular-G-hat-self-adjoint", comm.self_adjoint_residual, 1e-10 * s));
  rep.checks.push_back(
      check_against("modular-G-hat-S-commutation", comm.s_commutation_residual, 1e-10 * s));
  rep.values["covariance_residual"] = mod.covariance_residual;
  rep.values["s_operator_residual"] = worst_s;
}

void run_cp_checks(const ScenarioConfig& cfg, const Model& model, RunReport& rep) {
  double worst = 0.0;
  for (double t : {0.1, 1.0, 10.0}) {
    SuperOperator flow{model.gens.dim(), expm(t * model.gens.L.mat)};
    ChoiReport choi = choi_matrix(flow, cfg.tol.cp * cfg.tol.scale);
    worst = std::max(worst, -choi.min_eigenvalue / std::max(1.0, choi.scale));
  }
  rep.checks.push_back(check_against("complete-positivity", worst, cfg.tol.cp * cfg.tol.scale,
                                    "Choi minimum eigenvalue of e^{tL}, t in {0.1, 1, 10}"));
}

}  // namespace

RunReport run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir,
                       const std::string& series_stem) {
  RunReport rep;
  rep.name = cfg.name;
  Model model = build_model(cfg);
  const std::string stem = series_stem.empty() ? "series-" + cfg.name : series_stem;
  const std::string series_name = stem + ".csv";

  switch (cfg.kind) {
    case ScenarioKind::Synthesize: {
      if (model.family) {
        ConditionAReport cond = check_condition_A(SpectrumSpec::from_gibbs(model.gibbs));
        CheckLine c;
        c.name = "condition-A";
        c.status = cond.holds ? "PASS" : "FAIL";
        c.detail = cond.holds ? "" : "degenerate eigenvalue ratios";
        rep.checks.push_back(c);
        rep.values["jump_count"] = model.family->jumps.size();
      }
      run_verify_checks(cfg, model, rep);
      break;
    }
    case ScenarioKind::Verify:
      run_verify_checks(cfg, model, rep);
      run_structure_checks(cfg, model, rep);
      break;
    case ScenarioKind::Evolve:
      run_evolve(cfg, model, rep, out_dir, series_name);
      break;
    case ScenarioKind::Ergodic:
      run_ergodic(cfg, model, rep, out_dir, series_name);
      break;
    case ScenarioKind::Decay: {
      SpectralReport spec = spectral_report(model.gens, model.gibbs);
      rep.values["gap_theta"] = spec.gap_theta;
      run_decay(cfg, model, rep, out_dir, series_name);
      break;
    }
    case ScenarioKind::Unravel:
      run_unravel(cfg, model, rep);
      break;
    case ScenarioKind::Modular:
      run_modular(cfg, model, rep);
      break;
    case ScenarioKind::FullReport: {
      run_verify_checks(cfg, model, rep);
      run_structure_checks(cfg, model, rep);
      NullSpacesReport nulls = null_spaces(model.gens, model.gibbs);
      rep.checks.push_back(check_against("null-space-intersection", nulls.intersection_residual,
                                         cfg.tol.null_residual * cfg.tol.scale));
      rep.values["null_dim_L"] = nulls.null_L.dim;
      rep.values["null_dim_G"] = nulls.null_G.dim;
      rep.values["null_dim_L0"] = nulls.null_L0.dim;
      CommutantReport comm = commutant(model.gens.jumps, cfg.dim);
      rep.values["commutant_dim"] = comm.dim;
      SpectralReport spec = spectral_report(model.gens, model.gibbs);
      rep.values["gap_theta"] = spec.gap_theta;
      run_cp_checks(cfg, model, rep);
      run_ergodic(cfg, model, rep, out_dir, stem + "-ergodic.csv");
      run_decay(cfg, model, rep, out_dir, stem + "-decay.csv");
      run_modular(cfg, model, rep);
      break;
    }
  }
  return rep;
}

int run_config_file(const std::string& config_path, const std::string& out_dir,
                    std::optional<std::uint64_t> seed_override, int jobs) {
  Json root;
  {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot open config '" << config_path << "'\n";
      return 1;
    }
    try {
      in >> root;
    } catch (const std::exception& e) {
      std::cerr << "error: config parse failure: " << e.what() << "\n";
      return 1;
    }
  }

  std::vector<Json> scenario_jsons;
  if (root.is_object() && root.contains("scenarios")) {
    for (const auto& s : root["scenarios"]) scenario_jsons.push_back(s);
  } else if (root.is_array()) {
    for (const auto& s : root) scenario_jsons.push_back(s);
  } else {
    scenario_jsons.push_back(root);
  }

  std::vector<ScenarioConfig> configs;
  try {
    for (auto& sj : scenario_jsons) {
      ScenarioConfig cfg = ScenarioConfig::parse(sj);
      if (seed_override) cfg.seed = *seed_override;
      configs.push_back(std::move(cfg));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  std::filesystem::path out(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory '" << out_dir << "'\n";
    return 1;
  }

  std::vector<RunReport> reports(configs.size());
  std::vector<std::string> errors(configs.size());
  const int workers = std::max(1, jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t k = next.fetch_add(1);
      if (k >= configs.size()) return;
      try {
        const std::string stem = (configs.size() == 1) ? "series" : "series-" + configs[k].name;
        reports[k] = run_scenario(configs[k], out, stem);
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
  };
  if (workers == 1 || configs.size() <= 1) {
    worker();
  } else {
    std::vector<std::future<void>> pool;
    for (int w = 0; w < workers; ++w) pool.push_back(std::async(std::launch::async, worker));
    for (auto& f : pool) f.get();
  }

  for (std::size_t k = 0; k < configs.size(); ++k) {
    if (!errors[k].empty()) {
      std::cerr << "error: scenario '" << configs[k].name << "': " << errors[k] << "\n";
      return 1;
    }
  }

  Json out_json;
  bool any_fail = false;
  if (reports.size() == 1) {
    out_json = reports[0].to_json(configs[0].raw, configs[0].tol.echo());
    any_fail = reports[0].failed();
  } else {
    Json arr = Json::array();
    for (std::size_t k = 0; k < reports.size(); ++k) {
      arr.push_back(reports[k].to_json(configs[k].raw, configs[k].tol.echo()));
      any_fail = any_fail || reports[k].failed();
    }
    out_json["scenarios"] = arr;
  }
  {
    std::ofstream rf(out / "report.json", std::ios::binary);
    rf << out_json.dump(2) << "\n";
  }

  for (std::size_t k = 0; k < reports.size(); ++k) {
    for (const CheckLine& c : reports[k].checks)
      std::cout << "[" << reports[k].name << "] " << c.status << " " << c.name
                << " (residual " << c.residual << ", tolerance " << c.tolerance << ")"
                << (c.detail.empty() ? "" : " - " + c.detail) << "\n";
  }
  return any_fail ? 2 : 0;
}

}  // namespace qlab
