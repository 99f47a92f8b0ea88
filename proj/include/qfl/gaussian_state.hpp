#pragma once

#include "qfl/linalg.hpp"

namespace qfl {

/// Gaussian state of n bosonic modes in (momentum mean, position mean,
/// covariance) coordinates. The covariance is taken over the observables
/// (p_1..p_n, -q_1..-q_n) with q = (a + a^dag)/sqrt2, p = (a - a^dag)/(i sqrt2).
///
/// Construction only checks shapes; physical validity is reported by
/// validate().
class GaussianState {
 public:
  GaussianState(RealVector momentum_mean, RealVector position_mean, RealMatrix covariance);

  int n() const { return n_; }
  const RealVector& l() const { return l_; }
  const RealVector& m() const { return m_; }
  const RealMatrix& S() const { return s_; }

  /// The stacked vector (l; -m), i.e. the mean of (p, -q).
  RealVector phase_mean() const;
  static GaussianState from_phase_mean(const RealVector& mu, RealMatrix covariance);

 private:
  int n_;
  RealVector l_;
  RealVector m_;
  RealMatrix s_;
};

struct StateDiagnostic {
  bool is_valid = false;
  double min_eigenvalue = 0.0;   // of 2S + iJ
  double symmetry_defect = 0.0;  // max |S - S^T|
};

/// Checks S = S^T and 2S + iJ >= 0.
StateDiagnostic validate(const GaussianState& state, double tol = kDefaultPsdTol);

GaussianState vacuum(int n);

/// Coherent state psi(alpha). Means follow alpha = (m + i l)/sqrt2: real alpha
/// displaces position, imaginary alpha displaces momentum with positive sign
/// (alpha = i gives l = +sqrt2), as fixed against the Fock oracle.
GaussianState coherent(const ComplexVector& alpha);

/// Tr(rho W(z)) = exp{-i sqrt2 (l.x - m.y) - (x;y)^T S (x;y)}, (x;y) = real_embed(z).
/// Throws InvalidArgument for invalid states or length mismatch.
cplx weyl_transform(const GaussianState& state, const ComplexVector& z,
                    double tol = kDefaultPsdTol);

}  // namespace qfl
