#include "qlab/dynamics.hpp"

#include <cmath>
#include <random>

namespace qlab {

namespace {

const Complex kI(0.0, 1.0);

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Gaussian stream with an explicit Box-Muller transform so draws do not
/// depend on the standard library's distribution internals.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

 private:
  double uniform01() {
    // in (0, 1]; never 0 so the log above stays finite
    return (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
  }
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

double pairwise_sum(const std::vector<double>& xs, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 8) {
    double acc = 0.0;
    for (std::size_t k = lo; k < hi; ++k) acc += xs[k];
    return acc;
  }
  std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(xs, lo, mid) + pairwise_sum(xs, mid, hi);
}

}  // namespace

Matrix evolve_exact(const GeneratorPair& gens, const Matrix& x0, double t, Side side) {
  if (t < 0.0) throw InvalidParameter("evolve_exact: t must be >= 0 (one-sided semigroup)");
  const SuperOperator& S = (side == Side::State) ? gens.L : gens.Lp;
  if (x0.rows() != S.dim || x0.cols() != S.dim) throw ShapeError("evolve_exact: dimension mismatch");
  return unvec(expm(t * S.mat) * vec(x0));
}

EvolutionResult evolve_trajectory(const GeneratorPair& gens, const Matrix& x0,
                                  const std::vector<double>& times, Side side,
                                  EvolveMethod method, int trotter_steps) {
  if (times.empty()) throw InvalidParameter("evolve_trajectory: empty time list");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < 0.0) throw InvalidParameter("evolve_trajectory: negative time");
    if (k > 0 && times[k] < times[k - 1])
      throw InvalidParameter("evolve_trajectory: times must be ascending");
  }
  EvolutionResult out;
  out.times = times;
  out.side = side;
  out.method = method;
  out.trotter_steps = trotter_steps;
  out.max_trace_drift = 0.0;
  out.max_hermiticity_defect = 0.0;

  const Complex tr0 = x0.trace();
  const bool input_hermitian = hermiticity_defect(x0) <= 1e-12;
  for (double t : times) {
    Matrix xt;
    switch (method) {
      case EvolveMethod::Exact:
        xt = evolve_exact(gens, x0, t, side);
        break;
      case EvolveMethod::Trotter: {
        if (side != Side::State)
          throw InvalidParameter("evolve_trajectory: Trotter is defined on the state side");
        int n = std::max(1, static_cast<int>(std::ceil(t * trotter_steps)));
        xt = evolve_trotter(HermitianOperator(gens.H), gens.jumps, x0, t, n);
        break;
      }
      case EvolveMethod::Split: {
        if (side != Side::Observable)
          throw InvalidParameter("evolve_trajectory: the splitting acts on observables");
        xt = evolve_split(gens, x0, t).value;
        break;
      }
    }
    if (side == Side::State)
      out.max_trace_drift = std::max(out.max_trace_drift, std::abs(xt.trace() - tr0));
    if (input_hermitian)
      out.max_hermiticity_defect = std::max(out.max_hermiticity_defect, hermiticity_defect(xt));
    out.states.push_back(std::move(xt));
  }
  return out;
}

Matrix evolve_trotter(const HermitianOperator& H, const JumpOperatorSet& jumps, const Matrix& rho0,
                      double t, int n) {
  if (n < 1) throw InvalidParameter("evolve_trotter: n must be >= 1");
  if (t < 0.0) throw InvalidParameter("evolve_trotter: t must be >= 0");
  const Index d = H.dim();
  if (rho0.rows() != d || rho0.cols() != d) throw ShapeError("evolve_trotter: dimension mismatch");

  const double s = t / n;
  Matrix Y = jumps.empty() ? Matrix(Matrix::Zero(d, d)) : jumps.Y();
  Matrix B = expm((-kI * H.matrix() - 0.5 * Y) * s);
  Matrix phi = Matrix::Zero(d * d, d * d);
  for (const Matrix& w : jumps.jumps()) phi += kron(w.conjugate(), w);
  Matrix ephi = expm(s * phi);

  Matrix rho = rho0;
  for (int k = 0; k < n; ++k) {
    rho = unvec(ephi * vec(rho));
    rho = B * rho * B.adjoint();
  }
  return rho;
}

SplitResult evolve_split(const GeneratorPair& gens, const Matrix& A0, double t) {
  const Index d = gens.dim();
  if (A0.rows() != d || A0.cols() != d) throw ShapeError("evolve_split: dimension mismatch");
  Matrix split = unvec(expm(t * gens.L0p.mat) * (expm(t * gens.Gp.mat) * vec(A0)));
  Matrix exact = evolve_exact(gens, A0, t, Side::Observable);
  double disc = (split - exact).norm() / std::max(1.0, exact.norm());
  return SplitResult{std::move(split), disc, disc <= 1e-6};
}

TrajectoryEnsemble unravel(const HermitianOperator& H, const JumpOperatorSet& jumps,
                           const Vector& psi0, double t, double dt, int paths, std::uint64_t seed,
                           const Matrix& A) {
  const Index d = H.dim();
  if (psi0.size() != d) throw ShapeError("unravel: psi0 has wrong dimension");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw InvalidParameter("unravel: psi0 must be a unit vector");
  if (!(dt > 0.0) || dt > t) throw InvalidParameter("unravel: need 0 < dt <= t");
  if (paths < 1) throw InvalidParameter("unravel: need at least one path");
  if (A.rows() != d || A.cols() != d) throw ShapeError("unravel: observable has wrong dimension");
  if (hermiticity_defect(A) > 1e-10) throw InvalidParameter("unravel: observable must be Hermitian");

  const int steps = std::max<int>(1, static_cast<int>(std::llround(t / dt)));
  const double h = t / steps;
  const double sqrt_h = std::sqrt(h);
  Matrix Y = jumps.empty() ? Matrix(Matrix::Zero(d, d)) : jumps.Y();
  Matrix drift = -kI * H.matrix() - 0.5 * Y;  // dissipative drift; dual to the master equation
  bool warn = !jumps.empty() && dt * jumps.Y_operator_norm() > 0.1;

  const auto& ws = jumps.jumps();
  std::vector<double> values(static_cast<std::size_t>(paths));
  for (int p = 0; p < paths; ++p) {
    GaussianStream gauss(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(p) + 1)));
    Vector psi = psi0;
    for (int k = 0; k < steps; ++k) {
      Vector dpsi = drift * psi * h;
      for (const Matrix& w : ws) dpsi += (w * psi) * (sqrt_h * gauss.next());
      psi += dpsi;
    }
    values[static_cast<std::size_t>(p)] = (psi.dot(A * psi)).real();
  }

  const double n = static_cast<double>(paths);
  double mean = pairwise_sum(values, 0, values.size()) / n;
  double se = 0.0;
  if (paths > 1) {
    std::vector<double> sq(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) sq[k] = (values[k] - mean) * (values[k] - mean);
    double var = pairwise_sum(sq, 0, sq.size()) / (n - 1.0);
    se = std::sqrt(var / n);
  }
  return TrajectoryEnsemble{paths, h, seed, mean, se, warn};
}

ChoiReport choi_matrix(const SuperOperator& S, double tol) {
  const Index d = S.dim;
  Matrix C(d * d, d * d);
  for (Index a = 0; a < d; ++a)
    for (Index b = 0; b < d; ++b) {
      // vec(E_ab) is the unit vector at index b*d + a
      Matrix img = unvec(S.mat.col(b * d + a));
      C.block(a * d, b * d, d, d) = img;
    }
  double herm = hermiticity_defect(C);
  Matrix Ch = (C + C.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(Ch);
  double lo = es.eigenvalues().minCoeff();
  double scale = es.eigenvalues().cwiseAbs().maxCoeff();
  bool cp = herm <= tol && lo >= -tol * std::max(1.0, scale);
  return ChoiReport{std::move(C), lo, scale, herm, cp};
}

std::vector<Matrix> kraus_from_choi(const Matrix& choi, double cut) {
  Matrix Ch = (choi + choi.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(Ch);
  double tr = std::max(es.eigenvalues().sum(), 0.0);
  double threshold = cut * std::max(1.0, tr);
  std::vector<Matrix> out;
  for (Index k = 0; k < es.eigenvalues().size(); ++k) {
    double lam = es.eigenvalues()[k];
    if (lam <= threshold) continue;
    Vector v = es.eigenvectors().col(k);
    out.push_back(unvec(Vector(std::sqrt(lam) * v)));
  }
  return out;
}

Matrix ergodic_average(const GeneratorPair& gens, const Matrix& x0, double T, Side side) {
  if (!(T > 0.0)) throw InvalidParameter("ergodic_average: T must be positive");
  const SuperOperator& S = (side == Side::State) ? gens.L : gens.Lp;
  if (x0.rows() != S.dim || x0.cols() != S.dim) throw ShapeError("ergodic_average: dimension mismatch");
  return unvec(expm_phi1(T * S.mat) * vec(x0));
}

Matrix ergodic_average_quadrature(const GeneratorPair& gens, const Matrix& x0, double T, Side side,
                                  int quad_points) {
  if (!(T > 0.0)) throw InvalidParameter("ergodic_average_quadrature: T must be positive");
  if (quad_points < 1) throw InvalidParameter("ergodic_average_quadrature: need at least one node");
  const SuperOperator& S = (side == Side::State) ? gens.L : gens.Lp;
  std::vector<double> nodes, weights;
  gauss_legendre(quad_points, nodes, weights);
  Vector acc = Vector::Zero(S.dim * S.dim);
  Vector v0 = vec(x0);
  for (int k = 0; k < quad_points; ++k) acc += weights[k] * (expm(nodes[k] * T * S.mat) * v0);
  return unvec(acc);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  // roots of P_n on [-1,1] by Newton from the Chebyshev initial guess
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map to [0,1]
    nodes[i] = 0.5 * (1.0 - x);
    weights[i] = 0.5 * w;
    nodes[n - 1 - i] = 0.5 * (1.0 + x);
    weights[n - 1 - i] = 0.5 * w;
  }
}

}  // namespace qlab
