#pragma once

// Real/complex linear algebra shared by every module: the symplectic form,
// the real embedding of C^n, PSD tests, matrix exponentials and the Gram
// integral of a quasifree semigroup.

#include <complex>

#include <Eigen/Dense>

namespace qfl {

using cplx = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kDefaultPsdTol = 1e-9;

/// J_{2n} = [0 -I; I 0].
RealMatrix symplectic_form(int n);

/// Stacks (Re z; Im z).
RealVector real_embed(const ComplexVector& z);
/// Inverse of real_embed; the input length must be even.
ComplexVector real_extract(const RealVector& x);

struct PsdReport {
  bool is_psd = false;
  double min_eigenvalue = 0.0;
};

/// PSD test for a Hermitian matrix: passes iff the smallest eigenvalue is at
/// least -tol * (1 + ||H||_2). Throws InvalidArgument when H is not Hermitian
/// within the same relative tolerance.
PsdReport psd_check(const ComplexMatrix& h, double tol = kDefaultPsdTol);
PsdReport psd_check(const RealMatrix& h, double tol = kDefaultPsdTol);

/// Eigenpairs of a Hermitian matrix, eigenvalues sorted descending.
struct HermitianEigen {
  RealVector values;
  ComplexMatrix vectors;  // columns
};
HermitianEigen hermitian_eigen(const ComplexMatrix& h);

struct SymmetricEigen {
  RealVector values;
  RealMatrix vectors;
};
SymmetricEigen symmetric_eigen(const RealMatrix& h);

RealMatrix expm(const RealMatrix& a);
ComplexMatrix expm(const ComplexMatrix& a);

/// B_t = int_0^t exp(s K^T) C exp(s K) ds by the Van Loan block exponential.
RealMatrix gram_integral(const RealMatrix& k, const RealMatrix& c, double t);

/// max |A - A^T| (or A - A^H) entrywise.
double symmetry_defect(const RealMatrix& a);
double hermiticity_defect(const ComplexMatrix& a);

/// Largest absolute entry; used as the "size" of a matrix in relative tolerances.
double max_abs(const RealMatrix& a);
double max_abs(const ComplexMatrix& a);

}  // namespace qfl
