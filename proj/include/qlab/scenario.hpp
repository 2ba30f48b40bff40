#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qlab/core.hpp"
#include "qlab/gibbs.hpp"
#include "qlab/lindblad.hpp"
#include "qlab/qdb.hpp"

namespace qlab {

using Json = nlohmann::ordered_json;

enum class ScenarioKind { Synthesize, Verify, Evolve, Ergodic, Decay, Unravel, Modular, FullReport };

struct Tolerances {
  double qdb = 1e-9;
  double stationarity = 1e-11;
  double structure = 1e-6;
  double split = 1e-9;
  double decay_slack = 1e-6;
  double cp = 1e-9;
  double null_residual = 1e-9;
  double modular = 1e-9;
  double scale = 1.0;  // LAB_TOL_SCALE

  Json echo() const;
};

struct ScenarioConfig {
  ScenarioKind kind;
  std::string name;
  Index dim = 0;
  Matrix hamiltonian;
  double tau = 1.0;
  std::optional<RealMatrix> k_upper;  // qdb-synthesized
  int jump_count = -1;                // m; -1 = minimum
  std::vector<Matrix> explicit_jumps;
  std::string preset;                   // thermal-qubit | dephasing | ""
  std::vector<double> preset_rates;     // gamma(s)
  std::vector<double> times;            // evolve
  std::vector<double> T_list;           // ergodic
  std::vector<double> decay_samples;    // decay, in units of 1/theta
  double t_final = 1.0;                 // unravel
  double dt = 1e-3;
  int paths = 1000;
  std::uint64_t seed = 1;
  Matrix initial_state;  // density matrix (may be empty -> |0><0|)
  Matrix observable;     // Hermitian (may be empty -> identity)
  Tolerances tol;
  Json raw;  // echoed into the report

  static ScenarioConfig parse(const Json& j);
};

struct CheckLine {
  std::string name;
  std::string status;  // PASS | FAIL | SKIP
  double residual = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct RunReport {
  std::string name;
  std::vector<CheckLine> checks;
  Json values;
  std::vector<std::string> artifacts;

  bool failed() const;
  Json to_json(const Json& scenario_echo, const Json& tol_echo) const;
};

/// Builds the model named by the config: Gibbs state + generator pair.
struct Model {
  GibbsState gibbs;
  GeneratorPair gens;
  std::optional<QdbJumpFamily> family;  // present for synthesized jumps
};

Model build_model(const ScenarioConfig& cfg);

/// Runs one scenario, writing <out>/<series_stem>.csv when the kind
/// produces a time series (single-scenario configs use the plain
/// "series" stem). The report is returned, not written.
RunReport run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir,
                       const std::string& series_stem = "");

/// Reads LAB_TOL_SCALE (default 1).
double tolerance_scale_from_env();

/// `lab run`: parses the config file (one scenario object or
/// {"scenarios": [...]}), runs with `jobs` workers, writes report.json.
/// Returns the process exit code (0 ok, 1 usage/config, 2 check failure).
int run_config_file(const std::string& config_path, const std::string& out_dir,
                    std::optional<std::uint64_t> seed_override, int jobs);

}  // namespace qlab
