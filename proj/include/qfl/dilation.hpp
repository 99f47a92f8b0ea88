#pragma once

// Lindblad / Hamiltonian data that realise a quasifree semigroup as the
// vacuum expectation of a noisy Schroedinger equation.

#include <string>
#include <vector>

#include "qfl/linalg.hpp"
#include "qfl/quasifree.hpp"

namespace qfl {

inline constexpr double kDefaultRankTol = 1e-10;

/// lambda(z) = <u|z> + <z|v>.
cplx lambda_form(const ComplexVector& u, const ComplexVector& v, const ComplexVector& z);

/// The pair (K(u,v), C(u,v)) whose generator equals the Lindblad generator of
/// the single coupling L = a(u) + a^dag(v). K is defined by
///   R^{-1} K R z = (conj(lambda(z)) v - lambda(z) u) / 2,
/// which gives K = -J Im(beta beta^H) / 2 and C = Re(beta beta^H) with
/// beta = (u + conj v; -i(u - conj v)).
QuasifreePair pair_from_coupling(const ComplexVector& u, const ComplexVector& v);

/// beta = (u + conj v; -i(u - conj v)); D(K(u,v), C(u,v)) = beta beta^H.
ComplexVector coupling_vector(const ComplexVector& u, const ComplexVector& v);

/// One noise channel, stored as the stacked factor (b; c) of the noise matrix.
/// The coupling operator is L = a(u) + a^dag(v) with u + conj v = b and
/// u - conj v = i c.
struct LindbladTerm {
  ComplexVector b;
  ComplexVector c;

  ComplexVector u() const;
  ComplexVector v() const;
  static LindbladTerm from_coupling(const ComplexVector& u, const ComplexVector& v);
};

/// The quadratic term lambda/4 (a(w) + a^dag(w))^2 of H, w = beta + i gamma
/// with (beta; gamma) a unit eigenvector of N = sym(J K).
struct HamiltonianTerm {
  double lambda = 0.0;
  ComplexVector w;
};

struct DilationSpec {
  int n = 0;
  std::vector<LindbladTerm> lindblad;
  std::vector<HamiltonianTerm> hamiltonian;
  RealMatrix k_prime;   // residual, an element of sp(2n)
  RealMatrix source_k;
  RealMatrix source_c;
};

/// Splits an admissible (K, C) into Lindblad couplings, the residual K' and
/// the Hamiltonian terms of N = (JK + (JK)^T)/2. Eigenvalues of D at or below
/// rank_tol times its scale are discarded. Throws InvalidArgument for
/// rank_tol <= 0.
DilationSpec decompose(const QuasifreePair& pair, double rank_tol = kDefaultRankTol);

struct DecompositionResiduals {
  double c_residual = 0.0;         // max |sum C(u_j,v_j) - C|
  double k_residual = 0.0;         // max |sum K(u_j,v_j) + K' - K|
  double symplectic_defect = 0.0;  // max |K'^T J + J K'|
  double hamiltonian_residual = 0.0;  // max |sum lambda_j zeta_j zeta_j^T - J K'|
};

DecompositionResiduals reconstruction_residuals(const DilationSpec& spec);

/// -i[H, W(z)] = { a^dag(g) - a(g) + (<g|z> - <z|g>)/2 } W(z) with g = R^{-1} K' R z.
/// K' is rebuilt from the Hamiltonian terms and must agree with k_prime.
GeneratorCoefficients hamiltonian_action(const std::vector<HamiltonianTerm>& terms,
                                         const RealMatrix& k_prime, const ComplexVector& z);

/// sum_j K(u_j, v_j) + K' and sum_j C(u_j, v_j).
QuasifreePair reconstruct_pair(const DilationSpec& spec);

struct DilationReport {
  int n = 0;
  int noise_dimension = 0;  // r
  int hamiltonian_rank = 0; // r'
  bool pure_hamiltonian = false;  // r = 0: plain Schroedinger evolution
  bool trivial = false;           // nothing at all
  std::vector<std::pair<ComplexVector, ComplexVector>> couplings;  // (u_j, v_j)
  std::vector<HamiltonianTerm> hamiltonian;
  RealMatrix k_prime;
  std::string summary;
};

DilationReport dilation_report(const DilationSpec& spec);

}  // namespace qfl
