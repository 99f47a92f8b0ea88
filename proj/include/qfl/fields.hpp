#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "qfl/linalg.hpp"

namespace qfl {

/// Positive definite kernel on a finite point set, optionally invariant under
/// a list of permutations (0-based images: perm[j] is the image of point j).
struct KernelModel {
  std::vector<std::string> points;
  ComplexMatrix K;
  std::vector<std::vector<int>> group;

  int size() const { return static_cast<int>(K.rows()); }
};

/// Throws InvalidArgument if K is not Hermitian PSD, a permutation is malformed,
/// or K is not invariant under a listed permutation (checked to tol relative).
void validate_kernel(const KernelModel& model, double tol = kDefaultPsdTol);

/// Columns are the GNS vectors lambda(alpha_j), with <lambda_i|lambda_j> = K_ij.
ComplexMatrix gns_factor(const KernelModel& model, double tol = kDefaultPsdTol);

/// Unitary U on the span of the GNS vectors with U lambda(alpha) = lambda(g alpha).
ComplexMatrix gns_representation(const KernelModel& model, const std::vector<int>& perm,
                                 double tol = kDefaultPsdTol);

/// Vacuum variance 0.5 z^dag K z of Z = sum_j (x_j q(alpha_j) + y_j p(alpha_j)).
double vacuum_field_variance(const ComplexVector& z, const KernelModel& model);

struct FieldLaw {
  RealVector mean;
  RealMatrix covariance;
};

struct LevyAtom {
  double x = 0.0;
  double mass = 0.0;
};

struct LevyLaw {
  std::vector<LevyAtom> atoms;

  double mean() const;
  double variance() const;
  cplx characteristic(double t) const;
};

enum class FieldFamily { momentum, position };

/// Gaussian law of (p(u_1)..p(u_k)) (or the q family) in the coherent state psi(u0).
/// The vectors must have a real Gram matrix; entries with |Im| > tol are rejected.
FieldLaw coherent_gaussian_field(const ComplexVector& u0, const std::vector<ComplexVector>& us,
                                 FieldFamily family = FieldFamily::momentum, double tol = 1e-12);

LevyLaw levy_law(const ComplexMatrix& h, const ComplexVector& u, double tol = 1e-12);

inline constexpr double kPsdRepairTol = 1e-12;

/// Draws are rows. Gaussian draws use a Cholesky factor of the covariance after
/// clipping eigenvalues in [-1e-12, 0) to zero; anything more negative throws.
RealMatrix sample(const FieldLaw& law, int count, std::uint64_t seed, std::uint64_t stream = 0);
RealVector sample(const LevyLaw& law, int count, std::uint64_t seed, std::uint64_t stream = 0);

RealVector sample_mean(const RealMatrix& draws);
RealMatrix sample_covariance(const RealMatrix& draws);
cplx empirical_characteristic(const RealVector& draws, double t);

void write_samples_csv(std::ostream& os, const RealMatrix& draws, const std::string& prefix = "x");

}  // namespace qfl
