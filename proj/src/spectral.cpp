#include "qlab/spectral.hpp"

#include <cmath>
#include <limits>

namespace qlab {

namespace {

constexpr double kRankThreshold = 1e-10;
constexpr double kAmbiguousLow = 1e-11;
constexpr double kAmbiguousHigh = 1e-9;

Matrix sym_rep(const SuperOperator& S, const WeightedMetric& metric) {
  return metric.sqrt_gram() * S.mat * metric.inv_sqrt_gram();
}

double metric_condition(const WeightedMetric& metric) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(metric.gram());
  double lo = es.eigenvalues().minCoeff();
  double hi = es.eigenvalues().maxCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

/// Plain-orthonormal kernel basis of a (possibly stacked) matrix.
Matrix plain_kernel(const Matrix& M, bool* ambiguous = nullptr) {
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  double smax = s.size() ? s.maxCoeff() : 0.0;
  int rank = 0;
  for (Index k = 0; k < s.size(); ++k) {
    if (smax > 0.0 && s[k] > kRankThreshold * smax) ++rank;
    if (ambiguous && smax > 0.0 && s[k] > kAmbiguousLow * smax && s[k] < kAmbiguousHigh * smax)
      *ambiguous = true;
  }
  Index n = M.cols();
  return svd.matrixV().rightCols(n - rank);
}

}  // namespace

SuperOperator weighted_adjoint(const SuperOperator& S, const WeightedMetric& metric) {
  if (S.dim != metric.dim()) throw ShapeError("weighted_adjoint: dimension mismatch");
  if (metric_condition(metric) > 1e12)
    throw ConditioningError("weighted_adjoint: Gram matrix condition number exceeds 1e12");
  Matrix adj = metric.inv_sqrt_gram() * metric.inv_sqrt_gram() * S.mat.adjoint() *
               metric.sqrt_gram() * metric.sqrt_gram();
  return SuperOperator{S.dim, std::move(adj)};
}

KernelResult metric_kernel(const SuperOperator& S, const WeightedMetric& metric) {
  if (S.dim != metric.dim()) throw ShapeError("metric_kernel: dimension mismatch");
  Matrix st = sym_rep(S, metric);
  bool ambiguous = false;
  Matrix v = plain_kernel(st, &ambiguous);
  KernelResult out;
  out.dim = static_cast<int>(v.cols());
  out.basis = metric.inv_sqrt_gram() * v;  // metric-orthonormal
  out.rank_ambiguous = ambiguous;
  return out;
}

Matrix metric_projector(const KernelResult& kernel, const WeightedMetric& metric) {
  const Index n = metric.dim() * metric.dim();
  if (kernel.dim == 0) return Matrix::Zero(n, n);
  // columns are metric-orthonormal, so P = B B* M
  return kernel.basis * kernel.basis.adjoint() * metric.gram();
}

StructureReport structure_check(const GeneratorPair& gens, const GibbsState& gibbs) {
  WeightedMetric b_tau = WeightedMetric::b_tau(gibbs);
  WeightedMetric s_tau = WeightedMetric::s_tau(gibbs);
  WeightedMetric b_tau1 = WeightedMetric::b_tau_1(gibbs);

  auto sa_residual = [](const Matrix& st) {
    return (st - st.adjoint()).norm() / std::max(1.0, st.norm());
  };
  auto anti_residual = [](const Matrix& st) {
    return (st + st.adjoint()).norm() / std::max(1.0, st.norm());
  };
  auto max_eig = [](const Matrix& st) {
    Eigen::SelfAdjointEigenSolver<Matrix> es((st + st.adjoint()) / 2.0);
    return es.eigenvalues().maxCoeff() / std::max(1.0, st.norm());
  };

  StructureReport rep;
  Matrix gp_t = sym_rep(gens.Gp, b_tau);
  rep.gp_self_adjoint = sa_residual(gp_t);
  rep.gp_max_eigenvalue = max_eig(gp_t);
  rep.l0p_anti = anti_residual(sym_rep(gens.L0p, b_tau));
  Matrix g_t = sym_rep(gens.G, s_tau);
  rep.g_self_adjoint = sa_residual(g_t);
  rep.g_max_eigenvalue = max_eig(g_t);

  double comm = 0.0;
  for (double t : {0.3, 1.0, M_PI}) {
    Matrix e = expm(t * gens.L0.mat);
    comm = std::max(comm, (e * gens.G.mat - gens.G.mat * e).norm() / std::max(1.0, gens.G.mat.norm()));
  }
  rep.commutation = comm;
  rep.gp_tau1_symmetric = sa_residual(sym_rep(gens.Gp, b_tau1));

  struct Item {
    const char* name;
    double value;
    double tol;
  };
  const Item items[] = {
      {"gp-self-adjoint", rep.gp_self_adjoint, 1e-10},
      {"gp-negative", rep.gp_max_eigenvalue, 1e-10},
      {"l0p-anti-self-adjoint", rep.l0p_anti, 1e-10},
      {"g-self-adjoint", rep.g_self_adjoint, 1e-10},
      {"g-negative", rep.g_max_eigenvalue, 1e-10},
      {"l0-g-commutation", rep.commutation, 1e-9},
      {"gp-tau1-symmetric", rep.gp_tau1_symmetric, 1e-10},
  };
  rep.passed = true;
  for (const Item& it : items) {
    if (it.value > it.tol) rep.passed = false;
    if (it.value > 1e-6) rep.violations.push_back(it.name);
  }
  return rep;
}

void require_structure(const StructureReport& report) {
  if (!report.violations.empty())
    throw StructureViolation("structure_check: violated item '" + report.violations.front() + "'");
}

NullSpacesReport null_spaces(const GeneratorPair& gens, const GibbsState& gibbs) {
  WeightedMetric m = WeightedMetric::s_tau(gibbs);
  NullSpacesReport rep{metric_kernel(gens.L, m), metric_kernel(gens.G, m),
                       metric_kernel(gens.L0, m), 0.0, 0.0, false};
  rep.rank_ambiguous =
      rep.null_L.rank_ambiguous || rep.null_G.rank_ambiguous || rep.null_L0.rank_ambiguous;

  // intersection Null(G) /\ Null(L0) as the kernel of the stacked map
  const Index n = gens.dim() * gens.dim();
  Matrix stacked(2 * n, n);
  stacked.topRows(n) = gens.G.mat;
  stacked.bottomRows(n) = gens.L0.mat;
  Matrix inter = plain_kernel(stacked);

  // compare projectors (metric-orthogonal) by mutual inclusion
  Matrix p_l = metric_projector(rep.null_L, m);
  Matrix minv = m.inv_sqrt_gram();
  // metric-orthonormalize the intersection basis through the sqrt-gram coords
  Matrix tilted = m.sqrt_gram() * inter;
  Eigen::HouseholderQR<Matrix> qr(tilted);
  Matrix q = Matrix(qr.householderQ()).leftCols(inter.cols());
  KernelResult inter_k{minv * q, static_cast<int>(inter.cols()), false};
  Matrix p_i = metric_projector(inter_k, m);
  double denom = std::max(1.0, p_l.norm());
  rep.intersection_residual = (p_l - p_i).norm() / denom;

  rep.rho_tau_residual =
      gens.L.apply(gibbs.rho().matrix()).norm() / std::max(1.0, gens.L.mat.norm());
  return rep;
}

CommutantReport commutant(const JumpOperatorSet& jumps, Index dim_hint) {
  const Index d = jumps.empty() ? dim_hint : jumps.dim();
  if (d <= 0)
    throw InvalidParameter("commutant: empty jump set needs an explicit dimension hint");
  const Index n = d * d;
  const Matrix id = Matrix::Identity(d, d);

  CommutantReport rep;
  Matrix basis;
  if (jumps.empty()) {
    basis = Matrix::Identity(n, n);
  } else {
    Matrix stacked(2 * jumps.size() * n, n);
    Index row = 0;
    for (const Matrix& w : jumps.jumps()) {
      stacked.middleRows(row, n) = kron(id, w) - kron(w.transpose(), id);
      row += n;
      Matrix wd = w.adjoint();
      stacked.middleRows(row, n) = kron(id, wd) - kron(wd.transpose(), id);
      row += n;
    }
    basis = plain_kernel(stacked);
  }
  rep.dim = static_cast<int>(basis.cols());
  double worst = 0.0;
  for (Index k = 0; k < basis.cols(); ++k) {
    Matrix X = unvec(basis.col(k));
    rep.basis.push_back(X);
    double res = 0.0;
    for (const Matrix& w : jumps.jumps()) {
      res += (w * X - X * w).norm();
      res += (w.adjoint() * X - X * w.adjoint()).norm();
    }
    worst = std::max(worst, res / std::max(1e-300, X.norm()));
  }
  rep.worst_residual = worst;
  return rep;
}

SpectralReport spectral_report(const GeneratorPair& gens, const GibbsState& gibbs) {
  WeightedMetric b_tau = WeightedMetric::b_tau(gibbs);
  Matrix st = sym_rep(gens.Gp, b_tau);

  SpectralReport rep;
  Eigen::ComplexEigenSolver<Matrix> ces(gens.L.mat);
  rep.L_eigenvalues = ces.eigenvalues();

  rep.max_imag_residue = (st - st.adjoint()).norm() / std::max(1.0, st.norm());
  rep.self_adjointness_residual = rep.max_imag_residue;
  Eigen::SelfAdjointEigenSolver<Matrix> es((st + st.adjoint()) / 2.0);
  rep.gp_sym_eigenvalues = es.eigenvalues();
  rep.negativity_slack = es.eigenvalues().maxCoeff();

  double scale = es.eigenvalues().cwiseAbs().maxCoeff();
  double theta = 0.0;
  int null_dim = 0;
  for (Index k = 0; k < rep.gp_sym_eigenvalues.size(); ++k) {
    double a = std::abs(rep.gp_sym_eigenvalues[k]);
    if (scale > 0.0 && a <= kRankThreshold * scale) {
      ++null_dim;
    } else if (theta == 0.0 || a < theta) {
      theta = a;
    }
  }
  if (scale == 0.0) null_dim = static_cast<int>(rep.gp_sym_eigenvalues.size());
  rep.gap_theta = theta;
  rep.null_dim = null_dim;
  rep.null_basis = metric_kernel(gens.Gp, b_tau).basis;
  return rep;
}

namespace {

struct MetricSolve {
  Matrix proj;        // metric projector onto the chosen stationary space
  double bound_norm;  // || pinv(K)(x - P x) || in the metric
};

MetricSolve ergodic_pieces(const SuperOperator& K, const SuperOperator& null_of,
                           const WeightedMetric& metric, const Vector& x) {
  KernelResult kern = metric_kernel(null_of, metric);
  Matrix p = metric_projector(kern, metric);
  Vector xp = x - p * x;
  Matrix kt = metric.sqrt_gram() * K.mat * metric.inv_sqrt_gram();
  Vector xt = metric.sqrt_gram() * xp;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(kt);
  cod.setThreshold(kRankThreshold);
  Vector y = cod.solve(xt);
  return MetricSolve{std::move(p), y.norm()};
}

}  // namespace

ErgodicTable ergodic_limit_check(const GeneratorPair& gens, const GibbsState& gibbs,
                                 const Matrix& rho0, const Matrix& A0,
                                 const std::vector<double>& T_list) {
  WeightedMetric s_tau = WeightedMetric::s_tau(gibbs);
  WeightedMetric b_tau1 = WeightedMetric::b_tau_1(gibbs);
  WeightedMetric b_tau = WeightedMetric::b_tau(gibbs);

  MetricSolve st = ergodic_pieces(gens.L, gens.L, s_tau, vec(rho0));
  MetricSolve t1 = ergodic_pieces(gens.Lp, gens.Lp, b_tau1, vec(A0));
  MetricSolve tt = ergodic_pieces(gens.Lp, gens.Gp, b_tau, vec(A0));  // Q' onto Null(G')

  ErgodicTable table;
  table.bounds_hold = true;
  for (double T : T_list) {
    ErgodicRow row;
    row.T = T;
    Matrix avg_s = ergodic_average(gens, rho0, T, Side::State);
    Matrix avg_o = ergodic_average(gens, A0, T, Side::Observable);
    row.err_state = s_tau.norm(avg_s - unvec(Vector(st.proj * vec(rho0))));
    row.bound_state = 2.0 * st.bound_norm / T;
    row.err_tau1 = b_tau1.norm(avg_o - unvec(Vector(t1.proj * vec(A0))));
    row.bound_tau1 = 2.0 * t1.bound_norm / T;
    row.err_tau = b_tau.norm(avg_o - unvec(Vector(tt.proj * vec(A0))));
    row.bound_tau = 2.0 * tt.bound_norm / T;
    const double slack = 1e-9;
    if (row.err_state > row.bound_state * (1 + slack) + 1e-12 ||
        row.err_tau1 > row.bound_tau1 * (1 + slack) + 1e-12 ||
        row.err_tau > row.bound_tau * (1 + slack) + 1e-12)
      table.bounds_hold = false;
    table.rows.push_back(row);
  }

  auto ratio = [&table](double ErgodicRow::*field) {
    const std::size_t n = table.rows.size();
    if (n < 2) return 0.0;
    std::size_t ref = (n >= 3) ? n - 3 : n - 2;
    double hi = table.rows[n - 1].*field;
    double lo = table.rows[ref].*field;
    if (lo <= 1e-14) return 0.0;  // stationary input; nothing to contract
    return hi / lo;
  };
  table.tail_ratio_state = ratio(&ErgodicRow::err_state);
  table.tail_ratio_tau1 = ratio(&ErgodicRow::err_tau1);
  table.tail_ratio_tau = ratio(&ErgodicRow::err_tau);

  // err(2T) <= 0.75 err(T) on the largest doubling pair
  table.halving_ratio = 0.0;
  table.halving_ok = true;
  const std::size_t n = table.rows.size();
  if (n >= 2 && std::abs(table.rows[n - 1].T - 2.0 * table.rows[n - 2].T) <
                    1e-9 * table.rows[n - 1].T) {
    for (double ErgodicRow::*field :
         {&ErgodicRow::err_state, &ErgodicRow::err_tau1, &ErgodicRow::err_tau}) {
      double lo = table.rows[n - 2].*field;
      if (lo <= 1e-14) continue;
      table.halving_ratio = std::max(table.halving_ratio, table.rows[n - 1].*field / lo);
    }
    table.halving_ok = table.halving_ratio <= 0.75;
  }
  return table;
}

DecayTable gap_decay_check(const GeneratorPair& gens, const GibbsState& gibbs,
                           const std::vector<double>& samples_over_theta, const Matrix& rho0,
                           const Matrix& A0) {
  DecayTable table;
  table.spectral_note =
      "finite dimension: spectrum is pure point, the singular-continuous case is vacuous";
  table.bounds_hold = true;

  if (gens.jumps.empty() || gens.G.mat.norm() < 1e-14) {
    table.hypothesis_met = false;
    table.status = "hypothesis-not-met: G = 0, no spectral gap";
    table.theta = 0.0;
    table.zero_simple = false;
    table.fitted_prefactor = 0.0;
    return table;
  }

  WeightedMetric s_tau = WeightedMetric::s_tau(gibbs);
  WeightedMetric s_tau_t = WeightedMetric::s_tau_transpose(gibbs);
  WeightedMetric b_tau = WeightedMetric::b_tau(gibbs);

  // Condition (Null): Null(G) inside Null(L0)
  KernelResult ng = metric_kernel(gens.G, s_tau);
  KernelResult nl0 = metric_kernel(gens.L0, s_tau);
  Matrix pg = metric_projector(ng, s_tau);
  Matrix pl0 = metric_projector(nl0, s_tau);
  double inclusion = (pg - pl0 * pg).norm() / std::max(1.0, pg.norm());
  if (inclusion > 1e-9) {
    table.hypothesis_met = false;
    table.status = "hypothesis-not-met: Condition (Null) fails, Null(G) not inside Null(L0)";
    table.theta = 0.0;
    table.zero_simple = false;
    table.fitted_prefactor = 0.0;
    return table;
  }

  SpectralReport spec = spectral_report(gens, gibbs);
  table.hypothesis_met = true;
  table.status = "ok";
  table.theta = spec.gap_theta;
  table.zero_simple = (spec.null_dim == 1);

  Matrix q_state = metric_projector(ng, s_tau);
  Matrix q_dual = metric_projector(metric_kernel(gens.Gp, b_tau), b_tau);

  double norm_rho_st = s_tau.norm(rho0);
  double norm_rho_t = s_tau_t.norm(rho0);
  double norm_a = b_tau.norm(A0);
  const Matrix rho_tau = gibbs.rho().matrix();

  double prefactor = 0.0;
  for (double s : samples_over_theta) {
    double t = s / table.theta;
    DecayRow row;
    row.t = t;
    row.envelope = std::exp(-table.theta * t);
    Matrix bt = evolve_exact(gens, rho0, t, Side::State);
    Matrix btp = evolve_exact(gens, A0, t, Side::Observable);
    row.err_state = s_tau.norm(bt - unvec(Vector(q_state * vec(rho0))));
    row.err_dual = b_tau.norm(btp - unvec(Vector(q_dual * vec(A0))));
    row.err_state_T = table.zero_simple ? s_tau_t.norm(bt - rho_tau)
                                        : std::numeric_limits<double>::quiet_NaN();
    const double tol = 1.0 + 1e-6;
    if (row.err_state > tol * row.envelope * norm_rho_st) table.bounds_hold = false;
    if (row.err_dual > tol * row.envelope * norm_a) table.bounds_hold = false;
    if (table.zero_simple && row.err_state_T > tol * row.envelope * norm_rho_t)
      table.bounds_hold = false;
    if (norm_a > 0.0) prefactor = std::max(prefactor, row.err_dual / (row.envelope * norm_a));
    table.rows.push_back(row);
  }
  table.fitted_prefactor = prefactor;
  return table;
}

}  // namespace qlab
