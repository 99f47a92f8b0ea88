#pragma once

// Brute-force verifier: n bosonic modes truncated to `cutoff` levels each,
// with explicit ladder, quadrature and Weyl matrices and an RK4 integrator
// for the Lindblad master equation.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Sparse>

#include "qfl/dilation.hpp"
#include "qfl/gaussian_state.hpp"
#include "qfl/linalg.hpp"
#include "qfl/quasifree.hpp"

namespace qfl {

using SparseMatrix = Eigen::SparseMatrix<cplx>;

inline constexpr std::int64_t kDefaultDimCap = 4096;
inline constexpr int kDefaultStepsPerUnit = 2000;
/// Top-level population above which results are not trusted.
inline constexpr double kTrustedLeakage = 1e-8;
/// Top-level population above which oracle_compare refuses to run.
inline constexpr double kRefuseLeakage = 1e-6;

/// Truncated Fock space of n modes with `cutoff` levels each. Basis index
/// sum_j k_j cutoff^(n-1-j): mode 0 is the most significant digit.
class FockRep {
 public:
  FockRep(int n, int cutoff, std::int64_t dim_cap = kDefaultDimCap);

  int n() const { return n_; }
  int cutoff() const { return cutoff_; }
  Eigen::Index dim() const { return dim_; }

  const SparseMatrix& a(int mode) const { return a_.at(mode); }
  const SparseMatrix& adag(int mode) const { return adag_.at(mode); }
  SparseMatrix q(int mode) const;
  SparseMatrix p(int mode) const;
  SparseMatrix number() const;

  /// a(u) = sum_j conj(u_j) a_j (antilinear in u).
  SparseMatrix annihilation(const ComplexVector& u) const;
  /// a^dag(u) = sum_j u_j a_j^dag.
  SparseMatrix creation(const ComplexVector& u) const;

  int occupation(Eigen::Index index, int mode) const;

 private:
  int n_;
  int cutoff_;
  Eigen::Index dim_;
  std::vector<SparseMatrix> a_;
  std::vector<SparseMatrix> adag_;
};

/// exp(a^dag(z) - a(z)) on the truncated space.
ComplexMatrix weyl_matrix(const FockRep& rep, const ComplexVector& z);

/// Population of the top level of W(z)|vac>, the leakage indicator for weyl_matrix.
double weyl_leakage(const FockRep& rep, const ComplexVector& z);

/// Components exp(-|alpha|^2/2) alpha^k / sqrt(k!) per mode, tensored. Not renormalised.
ComplexVector coherent_vector(const FockRep& rep, const ComplexVector& alpha);

/// Largest, over modes, population of that mode's top level.
double top_level_population(const FockRep& rep, const ComplexVector& psi);
double top_level_population(const FockRep& rep, const ComplexMatrix& rho);

/// Hermitian, unit-trace, PSD matrix. Validated on construction.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix rho, double tol = 1e-9);
  static DensityMatrix pure(const ComplexVector& psi);

  const ComplexMatrix& matrix() const { return rho_; }
  Eigen::Index dim() const { return rho_.rows(); }

 private:
  ComplexMatrix rho_;
};

/// Displaced thermal state with the given means and a covariance
/// S = diag(s_1..s_n, s_1..s_n), s_j >= 1/2. Other covariances throw.
DensityMatrix gaussian_density(const FockRep& rep, const GaussianState& state);

/// Matrices entering the master equation built from a dilation:
/// L_j = a(u_j) + a^dag(v_j) and H_dyn = -1/4 sum_j lambda_j (a(w_j) + a^dag(w_j))^2.
struct LindbladOperators {
  SparseMatrix hamiltonian;
  std::vector<SparseMatrix> jumps;
};
LindbladOperators lindblad_operators(const FockRep& rep, const DilationSpec& spec);

/// d rho/dt = -i[H, rho] + sum_k (L_k rho L_k^dag - 1/2 {L_k^dag L_k, rho}), fixed-step RK4
/// with ceil(t * steps_per_unit) steps. Throws NumericalError when the trace drifts by more
/// than 1e-8 or entries stop being finite.
DensityMatrix lindblad_evolve(const FockRep& rep, const DensityMatrix& rho0,
                              const LindbladOperators& ops, double t,
                              int steps_per_unit = kDefaultStepsPerUnit);
DensityMatrix lindblad_evolve(const FockRep& rep, const DensityMatrix& rho0,
                              const DilationSpec& spec, double t,
                              int steps_per_unit = kDefaultStepsPerUnit);

/// rho at each of the nondecreasing times.
std::vector<DensityMatrix> lindblad_trajectory(const FockRep& rep, const DensityMatrix& rho0,
                                               const DilationSpec& spec,
                                               const std::vector<double>& times,
                                               int steps_per_unit = kDefaultStepsPerUnit);

/// Heisenberg-picture Lindblad generator
/// theta(X) = i[H, X] - 1/2 sum (L^dag L X + X L^dag L - 2 L^dag X L).
ComplexMatrix heisenberg_generator(const LindbladOperators& ops, const ComplexMatrix& x);

struct Moments {
  RealVector l;
  RealVector m;
  RealMatrix S;
};

/// Means and symmetrised covariance of (p_1..p_n, -q_1..-q_n).
Moments state_moments(const FockRep& rep, const DensityMatrix& rho);

cplx expectation(const DensityMatrix& rho, const ComplexMatrix& op);

struct OracleReport {
  double t = 0.0;
  double mean_error = 0.0;
  double cov_error = 0.0;
  double weyl_error = 0.0;
  double leakage = 0.0;
  Moments fock;
  GaussianState closed_form;
};

struct OracleOptions {
  int cutoff = 30;
  int steps_per_unit = kDefaultStepsPerUnit;
  std::vector<ComplexVector> weyl_points;  // empty: 5 random points with |z| <= 1
  std::uint64_t seed = 7;
  double rank_tol = kDefaultRankTol;
};

/// Runs the closed-form evolution and the Fock master equation side by side.
/// Throws TruncationLeakage when the top-level population exceeds kRefuseLeakage.
OracleReport oracle_compare(const GaussianState& state, const QuasifreePair& pair, double t,
                            const OracleOptions& options = {});
std::vector<OracleReport> oracle_trajectory(const GaussianState& state,
                                            const QuasifreePair& pair,
                                            const std::vector<double>& times,
                                            const OracleOptions& options = {});

/// CSV with columns t, l_1.., m_1.., S_11, S_12, .. (row-major).
void write_moment_csv(std::ostream& os, const std::vector<double>& times,
                      const std::vector<Moments>& moments);

}  // namespace qfl
