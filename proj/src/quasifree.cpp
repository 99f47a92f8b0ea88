#include "qfl/quasifree.hpp"

#include <algorithm>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <utility>

#include "qfl/error.hpp"

namespace qfl {

namespace {

void check_pair_shapes(const RealMatrix& k, const RealMatrix& c) {
  if (k.rows() != k.cols() || k.rows() % 2 != 0 || k.rows() == 0) {
    throw InvalidArgument("quasifree pair: K must be 2n x 2n with n >= 1");
  }
  if (c.rows() != k.rows() || c.cols() != k.cols()) {
    throw InvalidArgument("quasifree pair: C must have the same shape as K");
  }
}

}  // namespace

ComplexMatrix noise_matrix(const RealMatrix& k, const RealMatrix& c) {
  check_pair_shapes(k, c);
  const RealMatrix j = symplectic_form(static_cast<int>(k.rows() / 2));
  const RealMatrix im = k.transpose() * j + j * k;
  ComplexMatrix d(k.rows(), k.cols());
  d.real() = c;
  d.imag() = im;
  return d;
}

AdmissibilityReport admissible(const RealMatrix& k, const RealMatrix& c, double tol) {
  check_pair_shapes(k, c);
  if (symmetry_defect(c) > 1e-10 * (1.0 + max_abs(c))) {
    throw InvalidArgument("admissible: C is not symmetric");
  }
  const RealMatrix c_sym = 0.5 * (c + c.transpose());
  const PsdReport psd = psd_check(noise_matrix(k, c_sym), tol);
  return {psd.is_psd, psd.min_eigenvalue};
}

QuasifreePair::QuasifreePair(RealMatrix k, RealMatrix c, double tol)
    : n_(static_cast<int>(k.rows() / 2)), k_(std::move(k)), c_(std::move(c)) {
  report_ = admissible(k_, c_, tol);
  if (!report_.admissible) {
    throw InvalidArgument("QuasifreePair: C + i(K^T J + J K) is not PSD (min eigenvalue " +
                          std::to_string(report_.min_eigenvalue) + ")");
  }
  c_ = 0.5 * (c_ + c_.transpose()).eval();
}

WeylActionResult weyl_action(const QuasifreePair& pair, double t, const ComplexVector& z) {
  if (!(t >= 0.0)) throw InvalidArgument("weyl_action: t must be nonnegative");
  if (z.size() != pair.n()) throw InvalidArgument("weyl_action: z has wrong length");
  const RealVector rz = real_embed(z);
  const RealMatrix a = expm(RealMatrix(t * pair.K()));
  const RealMatrix b = gram_integral(pair.K(), pair.C(), t);
  return {real_extract(a * rz), 0.5 * rz.dot(b * rz)};
}

GaussianState evolve_state(const GaussianState& state, const QuasifreePair& pair, double t,
                           double tol) {
  if (!(t >= 0.0)) throw InvalidArgument("evolve_state: t must be nonnegative");
  if (state.n() != pair.n()) throw InvalidArgument("evolve_state: mode count mismatch");
  if (const auto diag = validate(state, tol); !diag.is_valid) {
    throw InvalidArgument("evolve_state: invalid input state (min eigenvalue " +
                          std::to_string(diag.min_eigenvalue) + ")");
  }
  const RealMatrix a = expm(RealMatrix(t * pair.K()));
  const RealMatrix b = gram_integral(pair.K(), pair.C(), t);
  RealMatrix s = a.transpose() * state.S() * a + 0.5 * b;
  s = 0.5 * (s + s.transpose()).eval();
  return GaussianState::from_phase_mean(a.transpose() * state.phase_mean(), std::move(s));
}

std::vector<GaussianState> evolve_trajectory(const GaussianState& state,
                                             const QuasifreePair& pair,
                                             const std::vector<double>& times, double tol) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), times.size()));
  std::vector<std::optional<GaussianState>> slots(times.size());
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < times.size(); i += workers) {
        slots[i] = evolve_state(state, pair, times[i], tol);
      }
    }));
  }
  for (auto& job : jobs) job.get();
  std::vector<GaussianState> out;
  out.reserve(times.size());
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

GeneratorCoefficients generator_action(const QuasifreePair& pair, const ComplexVector& z) {
  if (z.size() != pair.n()) throw InvalidArgument("generator_action: z has wrong length");
  const RealVector rz = real_embed(z);
  const ComplexVector g = real_extract(pair.K() * rz);
  const cplx gz = g.dot(z);  // Eigen's dot conjugates the first argument
  const cplx zg = z.dot(g);
  return {g, 0.5 * (gz - zg - rz.dot(pair.C() * rz))};
}

}  // namespace qfl
