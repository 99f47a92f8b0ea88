#include "qfl/gaussian_state.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "qfl/error.hpp"

namespace qfl {

GaussianState::GaussianState(RealVector momentum_mean, RealVector position_mean,
                             RealMatrix covariance)
    : n_(static_cast<int>(momentum_mean.size())),
      l_(std::move(momentum_mean)),
      m_(std::move(position_mean)),
      s_(std::move(covariance)) {
  if (n_ < 1) throw InvalidArgument("GaussianState: need at least one mode");
  if (m_.size() != n_) throw InvalidArgument("GaussianState: position mean has wrong length");
  if (s_.rows() != 2 * n_ || s_.cols() != 2 * n_) {
    throw InvalidArgument("GaussianState: covariance must be " + std::to_string(2 * n_) + "x" +
                          std::to_string(2 * n_));
  }
  if (!l_.allFinite() || !m_.allFinite() || !s_.allFinite()) {
    throw InvalidArgument("GaussianState: non-finite entries");
  }
}

RealVector GaussianState::phase_mean() const {
  RealVector mu(2 * n_);
  mu.head(n_) = l_;
  mu.tail(n_) = -m_;
  return mu;
}

GaussianState GaussianState::from_phase_mean(const RealVector& mu, RealMatrix covariance) {
  if (mu.size() % 2 != 0) throw InvalidArgument("from_phase_mean: odd length");
  const auto n = mu.size() / 2;
  return GaussianState(mu.head(n), -mu.tail(n), std::move(covariance));
}

StateDiagnostic validate(const GaussianState& state, double tol) {
  const RealMatrix& s = state.S();
  StateDiagnostic diag;
  diag.symmetry_defect = symmetry_defect(s);
  const bool symmetric = diag.symmetry_defect <= 1e-10 * (1.0 + max_abs(s));
  const RealMatrix sym = 0.5 * (s + s.transpose());
  const ComplexMatrix h =
      2.0 * sym.cast<cplx>() + cplx(0.0, 1.0) * symplectic_form(state.n()).cast<cplx>();
  const PsdReport psd = psd_check(h, tol);
  diag.min_eigenvalue = psd.min_eigenvalue;
  diag.is_valid = symmetric && psd.is_psd;
  return diag;
}

GaussianState vacuum(int n) {
  if (n < 1) throw InvalidArgument("vacuum: n must be >= 1");
  return GaussianState(RealVector::Zero(n), RealVector::Zero(n),
                       0.5 * RealMatrix::Identity(2 * n, 2 * n));
}

GaussianState coherent(const ComplexVector& alpha) {
  const auto n = alpha.size();
  if (n < 1) throw InvalidArgument("coherent: empty amplitude");
  const double r2 = std::sqrt(2.0);
  return GaussianState(r2 * alpha.imag(), r2 * alpha.real(),
                       0.5 * RealMatrix::Identity(2 * n, 2 * n));
}

cplx weyl_transform(const GaussianState& state, const ComplexVector& z, double tol) {
  if (z.size() != state.n()) throw InvalidArgument("weyl_transform: z has wrong length");
  const StateDiagnostic diag = validate(state, tol);
  if (!diag.is_valid) {
    throw InvalidArgument("weyl_transform: invalid Gaussian state (min eigenvalue " +
                          std::to_string(diag.min_eigenvalue) + ")");
  }
  const RealVector xy = real_embed(z);
  const auto n = state.n();
  const double phase = std::sqrt(2.0) * (state.l().dot(xy.head(n)) - state.m().dot(xy.tail(n)));
  const double quad = xy.dot(state.S() * xy);
  return std::exp(cplx(-quad, -phase));
}

}  // namespace qfl
