#include "qfl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "qfl/error.hpp"

namespace qfl {

RealMatrix symplectic_form(int n) {
  if (n < 1) throw InvalidArgument("symplectic_form: n must be >= 1");
  RealMatrix j = RealMatrix::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = -RealMatrix::Identity(n, n);
  j.bottomLeftCorner(n, n) = RealMatrix::Identity(n, n);
  return j;
}

RealVector real_embed(const ComplexVector& z) {
  const auto n = z.size();
  RealVector x(2 * n);
  x.head(n) = z.real();
  x.tail(n) = z.imag();
  return x;
}

ComplexVector real_extract(const RealVector& x) {
  if (x.size() % 2 != 0) {
    throw InvalidArgument("real_extract: odd length " + std::to_string(x.size()));
  }
  const auto n = x.size() / 2;
  ComplexVector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = cplx(x(i), x(n + i));
  return z;
}

double symmetry_defect(const RealMatrix& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("symmetry_defect: matrix not square");
  if (a.size() == 0) return 0.0;
  return (a - a.transpose()).cwiseAbs().maxCoeff();
}

double hermiticity_defect(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("hermiticity_defect: matrix not square");
  if (a.size() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

double max_abs(const RealMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }
double max_abs(const ComplexMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

HermitianEigen hermitian_eigen(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalError("hermitian_eigen: solver failed");
  const auto n = h.rows();
  HermitianEigen out{RealVector(n), ComplexMatrix(n, n)};
  // Eigen sorts ascending.
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = solver.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return out;
}

SymmetricEigen symmetric_eigen(const RealMatrix& h) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric_eigen: solver failed");
  const auto n = h.rows();
  SymmetricEigen out{RealVector(n), RealMatrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = solver.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return out;
}

PsdReport psd_check(const ComplexMatrix& h, double tol) {
  if (h.rows() != h.cols()) throw InvalidArgument("psd_check: matrix not square");
  if (!(tol >= 0.0)) throw InvalidArgument("psd_check: tolerance must be nonnegative");
  if (h.size() == 0) return {true, 0.0};
  const double scale = 1.0 + max_abs(h);
  const double herm_tol = std::max(tol, 1e-12) * scale;
  if (hermiticity_defect(h) > herm_tol) {
    throw InvalidArgument("psd_check: matrix is not Hermitian (defect " +
                          std::to_string(hermiticity_defect(h)) + ")");
  }
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("psd_check: eigen solver failed");
  const auto& ev = solver.eigenvalues();
  const double min_ev = ev.minCoeff();
  const double norm2 = std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
  return {min_ev >= -tol * (1.0 + norm2), min_ev};
}

PsdReport psd_check(const RealMatrix& h, double tol) {
  return psd_check(ComplexMatrix(h.cast<cplx>()), tol);
}

RealMatrix expm(const RealMatrix& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("expm: matrix not square");
  return a.exp();
}

ComplexMatrix expm(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("expm: matrix not square");
  return a.exp();
}

RealMatrix gram_integral(const RealMatrix& k, const RealMatrix& c, double t) {
  if (k.rows() != k.cols() || c.rows() != c.cols() || k.rows() != c.rows()) {
    throw InvalidArgument("gram_integral: K and C must be square of equal size");
  }
  if (!(t >= 0.0)) throw InvalidArgument("gram_integral: t must be nonnegative");
  if (symmetry_defect(c) > 1e-10 * (1.0 + max_abs(c))) {
    throw InvalidArgument("gram_integral: C must be symmetric");
  }
  const auto m = k.rows();
  // exp(t [[-K^T, C], [0, K]]) has upper-right block exp(-tK^T) B_t and
  // lower-right block exp(tK).
  RealMatrix block = RealMatrix::Zero(2 * m, 2 * m);
  block.topLeftCorner(m, m) = -k.transpose();
  block.topRightCorner(m, m) = c;
  block.bottomRightCorner(m, m) = k;
  const RealMatrix e = expm(RealMatrix(t * block));
  const RealMatrix b = e.bottomRightCorner(m, m).transpose() * e.topRightCorner(m, m);
  return 0.5 * (b + b.transpose());
}

}  // namespace qfl
