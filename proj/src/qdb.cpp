#include "qlab/qdb.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "qlab/dynamics.hpp"

namespace qlab {

SpectrumSpec::SpectrumSpec(RealVector rho) : dim(rho.size()), rho_s(std::move(rho)) {
  if (dim < 1) throw InvalidParameter("SpectrumSpec: empty spectrum");
  double sum = 0.0;
  for (Index k = 0; k < dim; ++k) {
    if (!(rho_s[k] > 0.0)) throw InvalidParameter("SpectrumSpec: eigenvalues must be strictly positive");
    sum += rho_s[k];
  }
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidParameter("SpectrumSpec: eigenvalues must sum to 1");
}

ConditionAReport check_condition_A(const SpectrumSpec& spec, double rel_tol) {
  const Index d = spec.dim;
  ConditionAReport rep{true, {}};
  for (Index r = 0; r < d; ++r)
    for (Index rp = 0; rp < d; ++rp) {
      if (r == rp) continue;
      double a = spec.rho_s[r] / spec.rho_s[rp];
      for (Index s = 0; s < d; ++s)
        for (Index sp = 0; sp < d; ++sp) {
          if (s == sp) continue;
          if (std::make_pair(s, sp) <= std::make_pair(r, rp)) continue;  // each unordered pair once
          double b = spec.rho_s[s] / spec.rho_s[sp];
          if (std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b))) {
            rep.holds = false;
            rep.violations.push_back({int(r), int(rp), int(s), int(sp)});
          }
        }
    }
  return rep;
}

BohrTable BohrTable::build(const SpectrumSpec& spec, double rel_tol) {
  const Index d = spec.dim;
  BohrTable t;
  t.omega.resize(d, d);
  for (Index r = 0; r < d; ++r)
    for (Index rp = 0; rp < d; ++rp) t.omega(r, rp) = std::log(spec.rho_s[r] / spec.rho_s[rp]);

  // distinct positive frequencies, ascending
  std::vector<double> pos;
  for (Index r = 0; r < d; ++r)
    for (Index rp = 0; rp < d; ++rp) {
      double w = t.omega(r, rp);
      if (w <= 0.0) continue;
      bool found = false;
      for (double v : pos)
        if (std::abs(v - w) <= rel_tol * std::max(std::abs(v), std::abs(w))) {
          found = true;
          break;
        }
      if (!found) pos.push_back(w);
    }
  std::sort(pos.begin(), pos.end());
  t.positive_count = static_cast<int>(pos.size());

  t.label.resize(d, d);
  for (Index r = 0; r < d; ++r)
    for (Index rp = 0; rp < d; ++rp) {
      double w = t.omega(r, rp);
      // zero label only for structural zeros (diagonal or exactly equal
      // eigenvalues); every other frequency matches a collected class
      if (r == rp || w == 0.0) {
        t.label(r, rp) = 0;
        continue;
      }
      double aw = std::abs(w);
      int q = 0;
      for (std::size_t k = 0; k < pos.size(); ++k)
        if (std::abs(pos[k] - aw) <= rel_tol * std::max(pos[k], aw)) {
          q = static_cast<int>(k) + 1;
          break;
        }
      if (q == 0) throw InternalError("BohrTable: frequency failed to match its own class");
      t.label(r, rp) = (w > 0.0) ? q : -q;
    }
  return t;
}

namespace {

// f_0 = e_1, f_k = (e_{2k} + i e_{2k+1})/sqrt(2), f_{-k} = conj(f_k); j is 1-based.
Complex f_component(int label, int j) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  if (label == 0) return (j == 1) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
  int k = std::abs(label);
  if (j == 2 * k) return Complex(inv_sqrt2, 0.0);
  if (j == 2 * k + 1) return (label > 0) ? Complex(0.0, inv_sqrt2) : Complex(0.0, -inv_sqrt2);
  return Complex(0.0, 0.0);
}

}  // namespace

std::vector<Matrix> build_A_tensors(const BohrTable& bohr, int m) {
  const Index d = bohr.omega.rows();
  const int min_m = 2 * bohr.positive_count + 1;
  if (m < min_m) {
    std::ostringstream os;
    os << "build_A_tensors: m = " << m << " is insufficient for " << bohr.positive_count
       << " positive frequencies; need m >= " << min_m;
    throw InsufficientJumps(os.str(), min_m);
  }
  std::vector<Matrix> out;
  out.reserve(m);
  for (int j = 1; j <= m; ++j) {
    Matrix A(d, d);
    for (Index r = 0; r < d; ++r)
      for (Index rp = 0; rp < d; ++rp) A(r, rp) = f_component(bohr.label(r, rp), j);
    out.push_back(std::move(A));
  }
  return out;
}

RealMatrix build_K(const SpectrumSpec& spec, const RealMatrix& upper) {
  const Index d = spec.dim;
  if (upper.rows() != d || upper.cols() != d) throw ShapeError("build_K: upper triangle has wrong shape");
  RealMatrix K = RealMatrix::Zero(d, d);
  for (Index r = 0; r < d; ++r)
    for (Index rp = r; rp < d; ++rp) {
      if (upper(r, rp) < 0.0) throw InvalidParameter("build_K: negative rate in upper triangle");
      K(r, rp) = upper(r, rp);
    }
  // cocycle K_{rr'} rho_r = K_{r'r} rho_r'
  for (Index r = 0; r < d; ++r)
    for (Index rp = 0; rp < r; ++rp) K(r, rp) = K(rp, r) * spec.rho_s[rp] / spec.rho_s[r];
  return K;
}

QdbJumpFamily synthesize(const SpectrumSpec& spec, const RealMatrix& upper, int m) {
  ConditionAReport cond = check_condition_A(spec);
  if (!cond.holds) {
    std::ostringstream os;
    os << "synthesize: Condition (A) violated for " << cond.violations.size()
       << " index quadruple(s); degenerate eigenvalue ratios";
    throw ConditionAViolated(os.str());
  }
  BohrTable bohr = BohrTable::build(spec);
  std::vector<Matrix> A = build_A_tensors(bohr, m);
  RealMatrix K = build_K(spec, upper);

  const Index d = spec.dim;
  std::vector<Matrix> ws;
  ws.reserve(A.size());
  for (const Matrix& Aj : A) {
    Matrix W = Matrix::Zero(d, d);
    // W_j = sum_{r,r'} sqrt(K_{rr'}) A^{(j)}_{rr'} P_{r'r}
    for (Index r = 0; r < d; ++r)
      for (Index rp = 0; rp < d; ++rp) W(rp, r) += std::sqrt(K(r, rp)) * Aj(r, rp);
    ws.push_back(std::move(W));
  }
  return QdbJumpFamily{std::move(K), std::move(A), JumpOperatorSet(std::move(ws))};
}

QdbJumpFamily synthesize(const GibbsState& g, const RealMatrix& upper, int m) {
  QdbJumpFamily fam = synthesize(SpectrumSpec::from_gibbs(g), upper, m);
  const Matrix& V = g.basis();
  std::vector<Matrix> rotated;
  rotated.reserve(fam.jumps.size());
  for (const Matrix& w : fam.jumps.jumps()) rotated.push_back(V * w * V.adjoint());
  fam.jumps = JumpOperatorSet(std::move(rotated));
  return fam;
}

QdbReport verify_qdb(const DensityMatrix& rho_ref, const GeneratorPair& gens, double tol) {
  const Index d = gens.dim();
  if (rho_ref.dim() != d) throw ShapeError("verify_qdb: dimension mismatch");
  if (rho_ref.min_eigenvalue() <= 0.0)
    throw InvalidParameter("verify_qdb: reference state must be strictly positive");
  const Matrix& rho = rho_ref.matrix();

  double residual = 0.0;
  for (Index a = 0; a < d; ++a)
    for (Index b = 0; b < d; ++b) {
      Matrix E = Matrix::Zero(d, d);
      E(a, b) = 1.0;
      Matrix lhs = gens.G.apply(E * rho);
      Matrix rhs = gens.Gp.apply(E) * rho;
      residual = std::max(residual, (lhs - rhs).norm());
    }

  // equivalent formulation: symmetry of G' in <A,B>_tau = Tr(A* B rho)
  std::mt19937_64 rng(0x9db5c1a2u);
  std::normal_distribution<double> nd;
  double sym = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Matrix A(d, d), B(d, d);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) {
        A(i, j) = Complex(nd(rng), nd(rng));
        B(i, j) = Complex(nd(rng), nd(rng));
      }
    Complex ab = (A.adjoint() * gens.Gp.apply(B) * rho).trace();
    Complex ba = (gens.Gp.apply(A).adjoint() * B * rho).trace();
    sym = std::max(sym, std::abs(ab - ba) / std::max(1.0, A.norm() * B.norm()));
  }

  double scale = std::max(1.0, gens.G.mat.norm());
  return QdbReport{residual, sym, scale, residual <= tol * scale};
}

CoefficientTables coefficient_tables(const GeneratorPair& gens, const GibbsState& gibbs) {
  const Index d = gens.dim();
  const Matrix& V = gibbs.basis();
  const RealVector& rho = gibbs.spectrum();

  // superoperators in the rho_tau eigenbasis: A~ = V* A V
  Matrix T = kron(V.transpose(), V.adjoint());
  Matrix Tinv = kron(V.conjugate(), V);
  Matrix Gp_eig = T * gens.Gp.mat * Tinv;
  Matrix phi = Matrix::Zero(d * d, d * d);
  for (const Matrix& w : gens.jumps.jumps()) phi += kron(w.transpose(), w.adjoint());
  Matrix phi_eig = T * phi * Tinv;

  // C_{rr',ss'} = Tr(P_sr G'(P_r's')) = [G'_eig]((s d + r), (s' d + r'))
  CoefficientTables out;
  out.K4.resize(d * d, d * d);
  out.C4.resize(d * d, d * d);
  for (Index r = 0; r < d; ++r)
    for (Index rp = 0; rp < d; ++rp)
      for (Index s = 0; s < d; ++s)
        for (Index sp = 0; sp < d; ++sp) {
          out.K4(r * d + rp, s * d + sp) = phi_eig(s * d + r, sp * d + rp);
          out.C4(r * d + rp, s * d + sp) = Gp_eig(s * d + r, sp * d + rp);
        }

  // Lemma: C = K4 - 1/2 delta_{rr'} delta_{ss'} sum_l (K_{rl} + K_{sl}),
  // with K_{rl} = K4_{rl,rl}; valid for families with the synthesis pattern.
  double lemma_res = 0.0, balance = 0.0, off_pattern = 0.0;
  for (Index r = 0; r < d; ++r)
    for (Index rp = 0; rp < d; ++rp)
      for (Index s = 0; s < d; ++s)
        for (Index sp = 0; sp < d; ++sp) {
          Complex K = out.K4(r * d + rp, s * d + sp);
          Complex C = out.C4(r * d + rp, s * d + sp);
          Complex pred = K;
          if (r == rp && s == sp) {
            double acc = 0.0;
            for (Index l = 0; l < d; ++l)
              acc += out.K4(r * d + l, r * d + l).real() + out.K4(s * d + l, s * d + l).real();
            pred -= 0.5 * acc;
          }
          lemma_res = std::max(lemma_res, std::abs(C - pred));
          bool pattern = (r == s && rp == sp) || (r == rp && s == sp);
          if (!pattern) off_pattern = std::max(off_pattern, std::abs(K));
          Complex other = out.C4(sp * d + s, rp * d + r);
          balance = std::max(balance, std::abs(C * rho[s] - other * rho[sp]));
        }
  out.lemma_c_residual = lemma_res;
  out.off_pattern_max = off_pattern;
  out.balance_residual = balance;
  return out;
}

ModularAverageResult modular_average(const GeneratorPair& gens, const GibbsState& gibbs,
                                     double freq_rel_tol) {
  const Index d = gens.dim();
  const Matrix& V = gibbs.basis();
  const RealVector& rho = gibbs.spectrum();

  Matrix phi = Matrix::Zero(d * d, d * d);
  for (const Matrix& w : gens.jumps.jumps()) phi += kron(w.transpose(), w.adjoint());

  Matrix T = kron(V.transpose(), V.adjoint());
  Matrix Tinv = kron(V.conjugate(), V);
  Matrix phi_eig = T * phi * Tinv;

  // vec index j*d + i carries Bohr frequency omega_{ij} = log(rho_i/rho_j)
  RealVector freq(d * d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) freq[j * d + i] = std::log(rho[i] / rho[j]);

  Matrix masked = phi_eig;
  for (Index row = 0; row < d * d; ++row)
    for (Index col = 0; col < d * d; ++col) {
      double a = freq[row], b = freq[col];
      double tol = freq_rel_tol * std::max({1.0, std::abs(a), std::abs(b)});
      if (std::abs(a - b) > tol) masked(row, col) = 0.0;
    }
  Matrix phi_avg = Tinv * masked * T;

  SuperOperator avg{d, phi_avg};
  ChoiReport choi = choi_matrix(avg);
  if (choi.min_eigenvalue < -1e-8 * std::max(1.0, choi.scale))
    throw InternalError("modular_average: averaged map lost complete positivity");
  std::vector<Matrix> kraus = kraus_from_choi(choi.choi);
  std::vector<Matrix> w_tilde;
  w_tilde.reserve(kraus.size());
  // observable side: Phi'(A) = sum M A M* with M = W~*
  for (const Matrix& M : kraus) w_tilde.push_back(M.adjoint());

  Matrix Yt = Matrix::Zero(d, d);
  for (const Matrix& w : w_tilde) Yt += w.adjoint() * w;
  Matrix commutator = Yt * gibbs.rho().matrix() - gibbs.rho().matrix() * Yt;
  double comm_res = commutator.norm() / std::max(1.0, Yt.norm());
  double dist = (phi_avg - phi).norm() / std::max(1.0, phi.norm());
  return ModularAverageResult{std::move(avg), std::move(w_tilde), comm_res, dist};
}

}  // namespace qlab
