#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "qfl/dilation.hpp"
#include "qfl/gaussian_state.hpp"
#include "qfl/linalg.hpp"
#include "qfl/quasifree.hpp"

namespace qfl::testing {

inline ComplexVector random_complex(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale / std::sqrt(2.0));
  ComplexVector v(n);
  for (int j = 0; j < n; ++j) v(j) = cplx(normal(rng), normal(rng));
  return v;
}

inline ComplexVector random_in_ball(int n, double radius, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-radius, radius);
  for (;;) {
    ComplexVector v(n);
    for (int j = 0; j < n; ++j) v(j) = cplx(uni(rng), uni(rng));
    if (v.norm() <= radius) return v;
  }
}

inline RealMatrix random_symmetric(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  RealMatrix a(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) a(i, j) = normal(rng);
  }
  return 0.5 * (a + a.transpose());
}

/// -J N with N symmetric, scaled to the given spectral norm.
inline RealMatrix random_symplectic_generator(int n, double norm, std::mt19937_64& rng) {
  const RealMatrix k = -symplectic_form(n) * random_symmetric(2 * n, rng);
  const double s = k.operatorNorm();
  return s > 0.0 ? RealMatrix(k * (norm / s)) : k;
}

struct PairDraw {
  QuasifreePair pair;
  std::vector<std::pair<ComplexVector, ComplexVector>> couplings;
  RealMatrix k_prime;
};

/// Sum of coupling pairs (u_j, v_j) plus a residual -J N. Gaussian couplings
/// by default; uniform in the ball of radius coupling_scale when ball is set.
inline PairDraw random_pair(int n, std::mt19937_64& rng, int couplings = -1, double coupling_scale = 0.6,
                            double kprime_norm = 1.0, bool ball = false) {
  std::uniform_int_distribution<int> count(1, 2 * n);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  const int r = couplings >= 0 ? couplings : count(rng);
  RealMatrix k = RealMatrix::Zero(2 * n, 2 * n);
  RealMatrix c = RealMatrix::Zero(2 * n, 2 * n);
  std::vector<std::pair<ComplexVector, ComplexVector>> used;
  for (int j = 0; j < r; ++j) {
    const ComplexVector u = ball ? random_in_ball(n, coupling_scale, rng) : random_complex(n, rng, coupling_scale);
    const ComplexVector v = ball ? random_in_ball(n, coupling_scale, rng) : random_complex(n, rng, coupling_scale);
    const QuasifreePair p = pair_from_coupling(u, v);
    k += p.K();
    c += p.C();
    used.emplace_back(u, v);
  }
  const RealMatrix kp = random_symplectic_generator(n, kprime_norm * frac(rng), rng);
  k += kp;
  return {QuasifreePair(k, c), used, kp};
}

/// S = Sp Sp^T / 2 + P with Sp symplectic and P >= 0, plus random means.
inline GaussianState random_state(int n, std::mt19937_64& rng, double squeeze = 0.4, double thermal = 0.3,
                                  double displacement = 1.0) {
  const RealMatrix j = symplectic_form(n);
  const RealMatrix sp = expm(RealMatrix(j * random_symmetric(2 * n, rng) * squeeze));
  const RealMatrix g = random_symmetric(2 * n, rng);
  const RealMatrix p = g * g.transpose() * thermal;
  std::normal_distribution<double> normal(0.0, displacement);
  RealVector l(n), m(n);
  for (int i = 0; i < n; ++i) {
    l(i) = normal(rng);
    m(i) = normal(rng);
  }
  return GaussianState(l, m, 0.5 * sp * sp.transpose() + p);
}

}  // namespace qfl::testing
