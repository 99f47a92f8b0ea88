#pragma once

#include <vector>

#include "qfl/gaussian_state.hpp"
#include "qfl/linalg.hpp"

namespace qfl {

/// D = C + i(K^T J + J K).
ComplexMatrix noise_matrix(const RealMatrix& k, const RealMatrix& c);

struct AdmissibilityReport {
  bool admissible = false;
  double min_eigenvalue = 0.0;  // of D
};

/// Tests C + i(K^T J + J K) >= 0. Throws InvalidArgument for bad shapes or an
/// asymmetric C.
AdmissibilityReport admissible(const RealMatrix& k, const RealMatrix& c,
                               double tol = kDefaultPsdTol);

/// A generator pair (K, C) of a quasifree completely positive semigroup.
/// Admissibility is checked once on construction; an inadmissible pair
/// cannot be built.
class QuasifreePair {
 public:
  QuasifreePair(RealMatrix k, RealMatrix c, double tol = kDefaultPsdTol);

  int n() const { return n_; }
  const RealMatrix& K() const { return k_; }
  const RealMatrix& C() const { return c_; }
  const AdmissibilityReport& admissibility() const { return report_; }

 private:
  int n_;
  RealMatrix k_;
  RealMatrix c_;
  AdmissibilityReport report_;
};

/// T_t(W(z)) = W(z_out) exp(-damping_exponent).
struct WeylActionResult {
  ComplexVector z_out;
  double damping_exponent = 0.0;
};

WeylActionResult weyl_action(const QuasifreePair& pair, double t, const ComplexVector& z);

/// Predual action on a Gaussian state:
///   (l_t; -m_t) = exp(tK^T)(l; -m),  S_t = exp(tK^T) S exp(tK) + B_t / 2.
GaussianState evolve_state(const GaussianState& state, const QuasifreePair& pair, double t,
                           double tol = kDefaultPsdTol);

/// evolve_state over a grid of times; entries are evaluated concurrently.
std::vector<GaussianState> evolve_trajectory(const GaussianState& state,
                                             const QuasifreePair& pair,
                                             const std::vector<double>& times,
                                             double tol = kDefaultPsdTol);

/// Coefficients of a generator applied to W(z), written as
///   { a^dag(g) - a(g) + scalar_part } W(z).
struct GeneratorCoefficients {
  ComplexVector gain_vector;
  cplx scalar_part{0.0, 0.0};
};

/// L(W(z)) for the semigroup generated by (K, C):
///   g = R^{-1} K R z,  scalar = (<g|z> - <z|g> - (Rz)^T C (Rz)) / 2.
GeneratorCoefficients generator_action(const QuasifreePair& pair, const ComplexVector& z);

}  // namespace qfl
