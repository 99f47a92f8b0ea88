#include "qfl/fock.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <string>
#include <utility>

#include "qfl/error.hpp"

namespace qfl {

namespace {

constexpr cplx kI{0.0, 1.0};

}  // namespace

FockRep::FockRep(int n, int cutoff, std::int64_t dim_cap) : n_(n), cutoff_(cutoff) {
  if (n < 1) throw InvalidArgument("FockRep: n must be >= 1");
  if (cutoff < 2) throw InvalidArgument("FockRep: cutoff must be >= 2");
  std::int64_t dim = 1;
  for (int j = 0; j < n; ++j) {
    dim *= cutoff;
    if (dim > dim_cap) {
      throw DimensionCapExceeded("FockRep: dimension " + std::to_string(cutoff) + "^" +
                                 std::to_string(n) + " exceeds cap " + std::to_string(dim_cap));
    }
  }
  dim_ = static_cast<Eigen::Index>(dim);

  a_.reserve(n);
  adag_.reserve(n);
  for (int mode = 0; mode < n; ++mode) {
    std::int64_t stride = 1;
    for (int j = mode + 1; j < n; ++j) stride *= cutoff;
    std::vector<Eigen::Triplet<cplx>> entries;
    entries.reserve(dim_);
    for (Eigen::Index idx = 0; idx < dim_; ++idx) {
      const int k = occupation(idx, mode);
      if (k > 0) entries.emplace_back(idx - stride, idx, std::sqrt(static_cast<double>(k)));
    }
    SparseMatrix a(dim_, dim_);
    a.setFromTriplets(entries.begin(), entries.end());
    adag_.push_back(SparseMatrix(a.adjoint()));
    a_.push_back(std::move(a));
  }
}

int FockRep::occupation(Eigen::Index index, int mode) const {
  for (int j = n_ - 1; j > mode; --j) index /= cutoff_;
  return static_cast<int>(index % cutoff_);
}

SparseMatrix FockRep::q(int mode) const {
  return SparseMatrix((a(mode) + adag(mode)) * (1.0 / std::sqrt(2.0)));
}

SparseMatrix FockRep::p(int mode) const {
  return SparseMatrix((a(mode) - adag(mode)) * (1.0 / (kI * std::sqrt(2.0))));
}

SparseMatrix FockRep::number() const {
  SparseMatrix num(dim_, dim_);
  for (int j = 0; j < n_; ++j) num += adag(j) * a(j);
  return num;
}

SparseMatrix FockRep::annihilation(const ComplexVector& u) const {
  if (u.size() != n_) throw InvalidArgument("annihilation: vector has wrong length");
  SparseMatrix out(dim_, dim_);
  for (int j = 0; j < n_; ++j) {
    if (u(j) != cplx(0.0)) out += std::conj(u(j)) * a(j);
  }
  return out;
}

SparseMatrix FockRep::creation(const ComplexVector& u) const {
  if (u.size() != n_) throw InvalidArgument("creation: vector has wrong length");
  SparseMatrix out(dim_, dim_);
  for (int j = 0; j < n_; ++j) {
    if (u(j) != cplx(0.0)) out += u(j) * adag(j);
  }
  return out;
}

ComplexMatrix weyl_matrix(const FockRep& rep, const ComplexVector& z) {
  const SparseMatrix gen = rep.creation(z) - rep.annihilation(z);
  return expm(ComplexMatrix(gen));
}

double weyl_leakage(const FockRep& rep, const ComplexVector& z) {
  const ComplexMatrix w = weyl_matrix(rep, z);
  return top_level_population(rep, ComplexVector(w.col(0)));
}

ComplexVector coherent_vector(const FockRep& rep, const ComplexVector& alpha) {
  if (alpha.size() != rep.n()) throw InvalidArgument("coherent_vector: wrong length");
  const int d = rep.cutoff();
  std::vector<ComplexVector> factors;
  for (int j = 0; j < rep.n(); ++j) {
    ComplexVector f(d);
    f(0) = std::exp(-0.5 * std::norm(alpha(j)));
    for (int k = 1; k < d; ++k) f(k) = f(k - 1) * alpha(j) / std::sqrt(static_cast<double>(k));
    factors.push_back(std::move(f));
  }
  ComplexVector psi(rep.dim());
  for (Eigen::Index idx = 0; idx < rep.dim(); ++idx) {
    cplx amp = 1.0;
    for (int j = 0; j < rep.n(); ++j) amp *= factors[j](rep.occupation(idx, j));
    psi(idx) = amp;
  }
  return psi;
}

double top_level_population(const FockRep& rep, const ComplexVector& psi) {
  if (psi.size() != rep.dim()) throw InvalidArgument("top_level_population: wrong length");
  double worst = 0.0;
  for (int j = 0; j < rep.n(); ++j) {
    double pop = 0.0;
    for (Eigen::Index idx = 0; idx < rep.dim(); ++idx) {
      if (rep.occupation(idx, j) == rep.cutoff() - 1) pop += std::norm(psi(idx));
    }
    worst = std::max(worst, pop);
  }
  return worst;
}

double top_level_population(const FockRep& rep, const ComplexMatrix& rho) {
  if (rho.rows() != rep.dim() || rho.cols() != rep.dim()) {
    throw InvalidArgument("top_level_population: wrong shape");
  }
  double worst = 0.0;
  for (int j = 0; j < rep.n(); ++j) {
    double pop = 0.0;
    for (Eigen::Index idx = 0; idx < rep.dim(); ++idx) {
      if (rep.occupation(idx, j) == rep.cutoff() - 1) pop += rho(idx, idx).real();
    }
    worst = std::max(worst, pop);
  }
  return worst;
}

DensityMatrix::DensityMatrix(ComplexMatrix rho, double tol) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() == 0) {
    throw InvalidArgument("DensityMatrix: must be square and nonempty");
  }
  if (!rho_.allFinite()) throw InvalidArgument("DensityMatrix: non-finite entries");
  if (hermiticity_defect(rho_) > tol) throw InvalidArgument("DensityMatrix: not Hermitian");
  if (std::abs(rho_.trace() - 1.0) > tol) {
    throw InvalidArgument("DensityMatrix: trace " + std::to_string(rho_.trace().real()) +
                          " differs from 1");
  }
  if (const PsdReport psd = psd_check(rho_, tol); !psd.is_psd) {
    throw InvalidArgument("DensityMatrix: not positive (min eigenvalue " +
                          std::to_string(psd.min_eigenvalue) + ")");
  }
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw InvalidArgument("DensityMatrix::pure: zero vector");
  const ComplexVector unit = psi / norm;
  return DensityMatrix(unit * unit.adjoint());
}

DensityMatrix gaussian_density(const FockRep& rep, const GaussianState& state) {
  const int n = state.n();
  if (n != rep.n()) throw InvalidArgument("gaussian_density: mode count mismatch");
  const RealMatrix& s = state.S();
  RealMatrix expected = RealMatrix::Zero(2 * n, 2 * n);
  std::vector<double> thermal(n);
  for (int j = 0; j < n; ++j) {
    expected(j, j) = expected(n + j, n + j) = s(j, j);
    thermal[j] = s(j, j) - 0.5;
    if (thermal[j] < -1e-12) throw InvalidArgument("gaussian_density: covariance below vacuum");
    thermal[j] = std::max(thermal[j], 0.0);
  }
  if (max_abs(RealMatrix(s - expected)) > 1e-12) {
    throw InvalidArgument(
        "gaussian_density: only per-mode isotropic covariances (displaced thermal states) "
        "can be prepared in the Fock oracle");
  }
  ComplexVector alpha(n);
  for (int j = 0; j < n; ++j) {
    alpha(j) = cplx(state.m()(j), state.l()(j)) / std::sqrt(2.0);
  }
  const bool pure = std::all_of(thermal.begin(), thermal.end(), [](double x) { return x == 0.0; });
  if (pure) return DensityMatrix::pure(coherent_vector(rep, alpha));

  ComplexMatrix rho = ComplexMatrix::Zero(rep.dim(), rep.dim());
  for (Eigen::Index idx = 0; idx < rep.dim(); ++idx) {
    double weight = 1.0;
    for (int j = 0; j < n; ++j) {
      const double nbar = thermal[j];
      const int k = rep.occupation(idx, j);
      weight *= std::pow(nbar, k) / std::pow(1.0 + nbar, k + 1);
    }
    rho(idx, idx) = weight;
  }
  const ComplexMatrix w = weyl_matrix(rep, alpha);
  rho = w * rho * w.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace();
  return DensityMatrix(std::move(rho));
}

LindbladOperators lindblad_operators(const FockRep& rep, const DilationSpec& spec) {
  if (spec.n != rep.n()) throw InvalidArgument("lindblad_operators: mode count mismatch");
  LindbladOperators ops;
  ops.hamiltonian = SparseMatrix(rep.dim(), rep.dim());
  for (const auto& term : spec.hamiltonian) {
    const SparseMatrix x = rep.annihilation(term.w) + rep.creation(term.w);
    ops.hamiltonian += (-0.25 * term.lambda) * SparseMatrix(x * x);
  }
  for (const auto& term : spec.lindblad) {
    ops.jumps.push_back(rep.annihilation(term.u()) + rep.creation(term.v()));
  }
  return ops;
}

namespace {

class MasterEquation {
 public:
  explicit MasterEquation(const LindbladOperators& ops) : jumps_(ops.jumps) {
    // drho = G rho + (G rho)^dag + sum L rho L^dag,  G = -i H - 1/2 sum L^dag L.
    const auto dim = ops.hamiltonian.rows();
    SparseMatrix decay(dim, dim);
    for (const auto& l : jumps_) decay += SparseMatrix(l.adjoint()) * l;
    drift_ = (-kI) * ops.hamiltonian - 0.5 * decay;
    drift_.makeCompressed();
  }

  void rhs(const ComplexMatrix& rho, ComplexMatrix& out) const {
    out.noalias() = drift_ * rho;
    out += out.adjoint().eval();
    for (const auto& l : jumps_) {
      tmp_.noalias() = l * rho;
      out.noalias() += l * tmp_.adjoint();
    }
  }

 private:
  std::vector<SparseMatrix> jumps_;
  SparseMatrix drift_;
  mutable ComplexMatrix tmp_;
};

void integrate(const MasterEquation& eq, ComplexMatrix& rho, double t, int steps_per_unit) {
  if (t <= 0.0) return;
  const long steps = std::max<long>(1, static_cast<long>(std::ceil(t * steps_per_unit - 1e-9)));
  const double h = t / static_cast<double>(steps);
  const auto dim = rho.rows();
  ComplexMatrix k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), stage(dim, dim);
  for (long s = 0; s < steps; ++s) {
    eq.rhs(rho, k1);
    stage = rho + (0.5 * h) * k1;
    eq.rhs(stage, k2);
    stage = rho + (0.5 * h) * k2;
    eq.rhs(stage, k3);
    stage = rho + h * k3;
    eq.rhs(stage, k4);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const cplx tr = rho.trace();
    if (!std::isfinite(tr.real()) || !std::isfinite(tr.imag()) || std::abs(tr - 1.0) > 1e-8) {
      throw NumericalError("lindblad_evolve: trace drifted to " + std::to_string(tr.real()) +
                           " at step " + std::to_string(s + 1) + "; reduce the step size");
    }
  }
  rho = 0.5 * (rho + rho.adjoint()).eval();
}

DensityMatrix integrated_state(ComplexMatrix rho) {
  try {
    return DensityMatrix(std::move(rho), 1e-8);
  } catch (const InvalidArgument& e) {
    throw NumericalError(std::string("lindblad_evolve: integration lost positivity (") + e.what() +
                         "); reduce the step size");
  }
}

void check_steps(const FockRep& rep, const DensityMatrix& rho0, int steps_per_unit) {
  if (steps_per_unit < 1) throw InvalidArgument("lindblad_evolve: steps_per_unit must be >= 1");
  if (rho0.dim() != rep.dim()) throw InvalidArgument("lindblad_evolve: dimension mismatch");
}

}  // namespace

DensityMatrix lindblad_evolve(const FockRep& rep, const DensityMatrix& rho0,
                              const LindbladOperators& ops, double t, int steps_per_unit) {
  check_steps(rep, rho0, steps_per_unit);
  if (!(t >= 0.0)) throw InvalidArgument("lindblad_evolve: t must be nonnegative");
  ComplexMatrix rho = rho0.matrix();
  integrate(MasterEquation(ops), rho, t, steps_per_unit);
  return integrated_state(std::move(rho));
}

DensityMatrix lindblad_evolve(const FockRep& rep, const DensityMatrix& rho0,
                              const DilationSpec& spec, double t, int steps_per_unit) {
  return lindblad_evolve(rep, rho0, lindblad_operators(rep, spec), t, steps_per_unit);
}

std::vector<DensityMatrix> lindblad_trajectory(const FockRep& rep, const DensityMatrix& rho0,
                                               const DilationSpec& spec,
                                               const std::vector<double>& times,
                                               int steps_per_unit) {
  check_steps(rep, rho0, steps_per_unit);
  const MasterEquation eq(lindblad_operators(rep, spec));
  std::vector<DensityMatrix> out;
  ComplexMatrix rho = rho0.matrix();
  double now = 0.0;
  for (double t : times) {
    if (!(t >= now)) throw InvalidArgument("lindblad_trajectory: times must be nondecreasing and >= 0");
    integrate(eq, rho, t - now, steps_per_unit);
    now = t;
    out.push_back(integrated_state(rho));
  }
  return out;
}

ComplexMatrix heisenberg_generator(const LindbladOperators& ops, const ComplexMatrix& x) {
  const ComplexMatrix h = ops.hamiltonian;
  ComplexMatrix out = kI * (h * x - x * h);
  for (const auto& sparse_l : ops.jumps) {
    const ComplexMatrix l = sparse_l;
    const ComplexMatrix ld = l.adjoint();
    out -= 0.5 * (ld * l * x + x * ld * l - 2.0 * ld * x * l);
  }
  return out;
}

cplx expectation(const DensityMatrix& rho, const ComplexMatrix& op) {
  if (op.rows() != rho.dim() || op.cols() != rho.dim()) {
    throw InvalidArgument("expectation: dimension mismatch");
  }
  return (rho.matrix().transpose().cwiseProduct(op)).sum();
}

Moments state_moments(const FockRep& rep, const DensityMatrix& rho) {
  if (rho.dim() != rep.dim()) throw InvalidArgument("state_moments: dimension mismatch");
  const int n = rep.n();
  std::vector<SparseMatrix> x;
  for (int j = 0; j < n; ++j) x.push_back(rep.p(j));
  for (int j = 0; j < n; ++j) x.push_back(SparseMatrix(-1.0 * rep.q(j)));

  const ComplexMatrix& r = rho.matrix();
  RealVector mu(2 * n);
  std::vector<ComplexMatrix> xr;  // X_j rho
  for (int i = 0; i < 2 * n; ++i) {
    xr.push_back(x[i] * r);
    mu(i) = xr.back().trace().real();
  }
  RealMatrix s(2 * n, 2 * n);
  for (int i = 0; i < 2 * n; ++i) {
    for (int j = i; j < 2 * n; ++j) {
      // Tr(X_i X_j rho) + Tr(X_j X_i rho), real part of the symmetrised product.
      const cplx ij = (x[i] * xr[j]).trace();
      const cplx ji = (x[j] * xr[i]).trace();
      s(i, j) = s(j, i) = 0.5 * (ij + ji).real() - mu(i) * mu(j);
    }
  }
  return {mu.head(n), -mu.tail(n), s};
}

namespace {

std::vector<ComplexVector> default_points(int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<ComplexVector> points;
  while (points.size() < 5) {
    ComplexVector z(n);
    for (int j = 0; j < n; ++j) z(j) = cplx(uni(gen), uni(gen));
    if (z.norm() <= 1.0) points.push_back(z);
  }
  return points;
}

OracleReport compare_one(const FockRep& rep, const DensityMatrix& rho, const GaussianState& exact,
                         double t, const std::vector<ComplexVector>& points) {
  OracleReport report{t, 0.0, 0.0, 0.0, top_level_population(rep, rho.matrix()),
                      state_moments(rep, rho), exact};
  if (report.leakage > kRefuseLeakage) {
    throw TruncationLeakage("oracle_compare: top-level population " +
                            std::to_string(report.leakage) + " at t = " + std::to_string(t) +
                            " exceeds " + std::to_string(kRefuseLeakage) +
                            "; increase the cutoff");
  }
  report.mean_error = std::max((report.fock.l - exact.l()).cwiseAbs().maxCoeff(),
                               (report.fock.m - exact.m()).cwiseAbs().maxCoeff());
  report.cov_error = max_abs(RealMatrix(report.fock.S - exact.S()));
  for (const auto& z : points) {
    const cplx fock_value = expectation(rho, weyl_matrix(rep, z));
    report.weyl_error = std::max(report.weyl_error, std::abs(fock_value - weyl_transform(exact, z)));
  }
  return report;
}

}  // namespace

std::vector<OracleReport> oracle_trajectory(const GaussianState& state,
                                            const QuasifreePair& pair,
                                            const std::vector<double>& times,
                                            const OracleOptions& options) {
  if (state.n() != pair.n()) throw InvalidArgument("oracle_compare: mode count mismatch");
  const FockRep rep(state.n(), options.cutoff);
  const DensityMatrix rho0 = gaussian_density(rep, state);
  if (const double leak = top_level_population(rep, rho0.matrix()); leak > kRefuseLeakage) {
    throw TruncationLeakage("oracle_compare: initial state has top-level population " +
                            std::to_string(leak) + "; increase the cutoff");
  }
  const std::vector<ComplexVector> points =
      options.weyl_points.empty() ? default_points(state.n(), options.seed) : options.weyl_points;
  for (const auto& z : points) {
    if (z.size() != state.n()) throw InvalidArgument("oracle_compare: Weyl point has wrong length");
  }
  const DilationSpec spec = decompose(pair, options.rank_tol);
  const std::vector<DensityMatrix> rhos =
      lindblad_trajectory(rep, rho0, spec, times, options.steps_per_unit);
  std::vector<OracleReport> reports;
  for (std::size_t i = 0; i < times.size(); ++i) {
    reports.push_back(compare_one(rep, rhos[i], evolve_state(state, pair, times[i]), times[i], points));
  }
  return reports;
}

OracleReport oracle_compare(const GaussianState& state, const QuasifreePair& pair, double t,
                            const OracleOptions& options) {
  return oracle_trajectory(state, pair, {t}, options).front();
}

void write_moment_csv(std::ostream& os, const std::vector<double>& times,
                      const std::vector<Moments>& moments) {
  if (times.size() != moments.size()) throw InvalidArgument("write_moment_csv: size mismatch");
  if (moments.empty()) return;
  const auto n = moments.front().l.size();
  os << "t";
  for (Eigen::Index j = 0; j < n; ++j) os << ",l_" << j + 1;
  for (Eigen::Index j = 0; j < n; ++j) os << ",m_" << j + 1;
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    for (Eigen::Index j = 0; j < 2 * n; ++j) os << ",S_" << i + 1 << '_' << j + 1;
  }
  os << '\n' << std::setprecision(17);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const Moments& mom = moments[k];
    os << times[k];
    for (Eigen::Index j = 0; j < n; ++j) os << ',' << mom.l(j);
    for (Eigen::Index j = 0; j < n; ++j) os << ',' << mom.m(j);
    for (Eigen::Index i = 0; i < 2 * n; ++i) {
      for (Eigen::Index j = 0; j < 2 * n; ++j) os << ',' << mom.S(i, j);
    }
    os << '\n';
  }
}

}  // namespace qfl
