#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qlab/acceptance.hpp"
#include "qlab/dynamics.hpp"
#include "qlab/gibbs.hpp"
#include "qlab/lindblad.hpp"
#include "qlab/modular.hpp"
#include "qlab/qdb.hpp"
#include "qlab/spectral.hpp"

namespace py = pybind11;
using namespace qlab;

namespace {

Side side_from(const std::string& s) {
  if (s == "state") return Side::State;
  if (s == "observable") return Side::Observable;
  throw InvalidParameter("side must be 'state' or 'observable'");
}

JumpOperatorSet jumps_from(const std::vector<Matrix>& ws) {
  return ws.empty() ? JumpOperatorSet() : JumpOperatorSet(ws);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lindblad open-system laboratory: generators, QDB synthesis, "
            "spectral checks, dynamics";

  py::register_exception<Error>(m, "LabError");

  py::class_<GibbsState>(m, "Gibbs")
      .def(py::init([](const Matrix& h, double tau) {
             return make_gibbs(HermitianOperator(h), tau);
           }),
           py::arg("hamiltonian"), py::arg("tau"))
      .def_property_readonly("rho", [](const GibbsState& g) { return g.rho().matrix(); })
      .def_property_readonly("Z", &GibbsState::partition_function)
      .def_property_readonly("tau", &GibbsState::tau)
      .def_property_readonly("dim", &GibbsState::dim)
      .def_property_readonly("spectrum", &GibbsState::spectrum)
      .def_property_readonly("basis", &GibbsState::basis)
      .def("rho_power", &GibbsState::rho_power, py::arg("exponent"))
      .def("inner",
           [](const GibbsState& g, const std::string& side, double r, const Matrix& x,
              const Matrix& y) {
             WeightedMetric metric = (side_from(side) == Side::State)
                                         ? WeightedMetric::state(g, r)
                                         : WeightedMetric::observable(g, r);
             return metric.inner(x, y);
           },
           py::arg("side"), py::arg("r"), py::arg("x"), py::arg("y"),
           "weighted inner product: state side Tr(x* rho^-r y rho^{r-1}), "
           "observable side Tr(x* rho^r y rho^{1-r})")
      .def("norm", [](const GibbsState& g, const std::string& side, double r, const Matrix& x) {
        WeightedMetric metric = (side_from(side) == Side::State)
                                    ? WeightedMetric::state(g, r)
                                    : WeightedMetric::observable(g, r);
        return metric.norm(x);
      });

  py::class_<GeneratorPair>(m, "Generators")
      .def_property_readonly("L", [](const GeneratorPair& g) { return g.L.mat; })
      .def_property_readonly("L0", [](const GeneratorPair& g) { return g.L0.mat; })
      .def_property_readonly("G", [](const GeneratorPair& g) { return g.G.mat; })
      .def_property_readonly("Lp", [](const GeneratorPair& g) { return g.Lp.mat; })
      .def_property_readonly("L0p", [](const GeneratorPair& g) { return g.L0p.mat; })
      .def_property_readonly("Gp", [](const GeneratorPair& g) { return g.Gp.mat; })
      .def_property_readonly("dim", &GeneratorPair::dim)
      .def("apply", [](const GeneratorPair& g, const Matrix& x, const std::string& side) {
        return (side_from(side) == Side::State) ? g.L.apply(x) : g.Lp.apply(x);
      });

  m.def("build_generators",
        [](const Matrix& h, const std::vector<Matrix>& ws) {
          return build_generators(HermitianOperator(h), jumps_from(ws));
        },
        py::arg("hamiltonian"), py::arg("jumps"));

  m.def("synthesize",
        [](const GibbsState& g, const RealMatrix& k_upper, int m) {
          if (m < 0) {
            BohrTable bohr = BohrTable::build(SpectrumSpec::from_gibbs(g));
            m = 2 * bohr.positive_count + 1;
          }
          QdbJumpFamily fam = synthesize(g, k_upper, m);
          py::dict out;
          out["jumps"] = fam.jumps.jumps();
          out["K"] = fam.K;
          return out;
        },
        py::arg("gibbs"), py::arg("k_upper"), py::arg("m") = -1,
        "jump family satisfying quantum detailed balance exactly");

  m.def("verify_qdb",
        [](const GibbsState& g, const GeneratorPair& gens) {
          QdbReport rep = verify_qdb(g.rho(), gens);
          py::dict out;
          out["residual"] = rep.residual;
          out["symmetry_residual"] = rep.symmetry_residual;
          out["scale"] = rep.scale;
          out["pass"] = rep.pass;
          return out;
        },
        py::arg("gibbs"), py::arg("generators"));

  m.def("structure_check", [](const GeneratorPair& gens, const GibbsState& g) {
    StructureReport rep = structure_check(gens, g);
    py::dict out;
    out["gp_self_adjoint"] = rep.gp_self_adjoint;
    out["gp_max_eigenvalue"] = rep.gp_max_eigenvalue;
    out["l0p_anti"] = rep.l0p_anti;
    out["g_self_adjoint"] = rep.g_self_adjoint;
    out["g_max_eigenvalue"] = rep.g_max_eigenvalue;
    out["commutation"] = rep.commutation;
    out["gp_tau1_symmetric"] = rep.gp_tau1_symmetric;
    out["passed"] = rep.passed;
    out["violations"] = rep.violations;
    return out;
  });

  m.def("spectral_report", [](const GeneratorPair& gens, const GibbsState& g) {
    SpectralReport rep = spectral_report(gens, g);
    py::dict out;
    out["gap_theta"] = rep.gap_theta;
    out["null_dim"] = rep.null_dim;
    out["L_eigenvalues"] = rep.L_eigenvalues;
    out["gp_sym_eigenvalues"] = rep.gp_sym_eigenvalues;
    out["self_adjointness_residual"] = rep.self_adjointness_residual;
    out["negativity_slack"] = rep.negativity_slack;
    return out;
  });

  m.def("null_dimensions", [](const GeneratorPair& gens, const GibbsState& g) {
    NullSpacesReport rep = null_spaces(gens, g);
    py::dict out;
    out["L"] = rep.null_L.dim;
    out["G"] = rep.null_G.dim;
    out["L0"] = rep.null_L0.dim;
    out["intersection_residual"] = rep.intersection_residual;
    return out;
  });

  m.def("commutant_dim",
        [](const std::vector<Matrix>& ws, Index dim) { return commutant(jumps_from(ws), dim).dim; },
        py::arg("jumps"), py::arg("dim"));

  m.def("evolve_exact",
        [](const GeneratorPair& gens, const Matrix& x0, double t, const std::string& side) {
          return evolve_exact(gens, x0, t, side_from(side));
        },
        py::arg("generators"), py::arg("x0"), py::arg("t"), py::arg("side") = "state");

  m.def("evolve_trotter",
        [](const Matrix& h, const std::vector<Matrix>& ws, const Matrix& rho0, double t, int n) {
          return evolve_trotter(HermitianOperator(h), jumps_from(ws), rho0, t, n);
        },
        py::arg("hamiltonian"), py::arg("jumps"), py::arg("rho0"), py::arg("t"), py::arg("n"));

  m.def("evolve_split",
        [](const GeneratorPair& gens, const Matrix& a0, double t) {
          SplitResult r = evolve_split(gens, a0, t);
          return py::make_tuple(r.value, r.discrepancy, r.qdb_consistent);
        },
        py::arg("generators"), py::arg("a0"), py::arg("t"));

  m.def("unravel",
        [](const Matrix& h, const std::vector<Matrix>& ws, const Vector& psi0, double t, double dt,
           int paths, std::uint64_t seed, const Matrix& a) {
          TrajectoryEnsemble ens = unravel(HermitianOperator(h), jumps_from(ws), psi0, t, dt,
                                           paths, seed, a);
          py::dict out;
          out["mean"] = ens.mean;
          out["std_error"] = ens.std_error;
          out["paths"] = ens.paths;
          out["dt"] = ens.dt;
          out["seed"] = ens.seed;
          out["stability_warning"] = ens.stability_warning;
          return out;
        },
        py::arg("hamiltonian"), py::arg("jumps"), py::arg("psi0"), py::arg("t"), py::arg("dt"),
        py::arg("paths"), py::arg("seed"), py::arg("observable"));

  m.def("choi",
        [](const Matrix& superop_mat) {
          Index n = superop_mat.rows();
          auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n))));
          if (d * d != n || superop_mat.cols() != n)
            throw ShapeError("choi: expected a d^2 x d^2 matrix");
          ChoiReport rep = choi_matrix(SuperOperator{d, superop_mat});
          py::dict out;
          out["choi"] = rep.choi;
          out["min_eigenvalue"] = rep.min_eigenvalue;
          out["completely_positive"] = rep.completely_positive;
          return out;
        },
        py::arg("superoperator"));

  m.def("ergodic_average",
        [](const GeneratorPair& gens, const Matrix& x0, double T, const std::string& side) {
          return ergodic_average(gens, x0, T, side_from(side));
        },
        py::arg("generators"), py::arg("x0"), py::arg("T"), py::arg("side") = "state");

  m.def("gap_decay",
        [](const GeneratorPair& gens, const GibbsState& g, const std::vector<double>& samples,
           const Matrix& rho0, const Matrix& a0) {
          DecayTable t = gap_decay_check(gens, g, samples, rho0, a0);
          py::dict out;
          out["hypothesis_met"] = t.hypothesis_met;
          out["status"] = t.status;
          out["theta"] = t.theta;
          out["zero_simple"] = t.zero_simple;
          out["bounds_hold"] = t.bounds_hold;
          out["fitted_prefactor"] = t.fitted_prefactor;
          return out;
        },
        py::arg("generators"), py::arg("gibbs"), py::arg("samples"), py::arg("rho0"),
        py::arg("a0"));

  m.def("modular_checks", [](const GeneratorPair& gens, const GibbsState& g) {
    ModularData mod = build_modular(g);
    ModularCommutationReport comm = check_modular_commutation(mod, gens, g);
    py::dict out;
    out["covariance_residual"] = mod.covariance_residual;
    out["L_tau_omega_residual"] = (mod.L_tau.mat * mod.omega).norm();
    out["commutation_residual"] = comm.commutation_residual;
    out["self_adjoint_residual"] = comm.self_adjoint_residual;
    out["s_commutation_residual"] = comm.s_commutation_residual;
    return out;
  });

  m.def("vec", &vec, py::arg("matrix"), "column-stacking vectorization");
  m.def("unvec", &unvec, py::arg("vector"));
  m.def("schatten_norm", &schatten_norm, py::arg("matrix"), py::arg("p"));

  m.def("selftest", [](double tol_scale) {
    AcceptanceOptions opts;
    opts.dims = {2, 3, 4};
    opts.tol_scale = tol_scale;
    AcceptanceSummary s = run_acceptance(opts);
    py::list out;
    for (const CriterionResult& r : s.results)
      out.append(py::make_tuple(r.id, r.name, r.pass, r.detail));
    return out;
  }, py::arg("tol_scale") = 1.0);
}
