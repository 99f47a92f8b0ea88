#include "qfl/fields.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>

#include "qfl/error.hpp"

namespace qfl {

namespace {

void check_perm(const std::vector<int>& perm, int n) {
  if (static_cast<int>(perm.size()) != n) throw InvalidArgument("kernel: permutation has wrong length");
  std::vector<bool> seen(n, false);
  for (int image : perm) {
    if (image < 0 || image >= n || seen[image]) throw InvalidArgument("kernel: not a permutation");
    seen[image] = true;
  }
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

void validate_kernel(const KernelModel& model, double tol) {
  const int n = model.size();
  if (n < 1 || model.K.cols() != n) throw InvalidArgument("kernel: K must be square and nonempty");
  if (!model.points.empty() && static_cast<int>(model.points.size()) != n) {
    throw InvalidArgument("kernel: point labels do not match K");
  }
  if (!model.K.allFinite()) throw InvalidArgument("kernel: K has non-finite entries");
  const PsdReport psd = psd_check(model.K, tol);
  if (!psd.is_psd) throw InvalidArgument("kernel: K is not positive semidefinite");
  const double bound = tol * (1.0 + max_abs(model.K));
  for (const auto& perm : model.group) {
    check_perm(perm, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (std::abs(model.K(perm[i], perm[j]) - model.K(i, j)) > bound) {
          throw InvalidArgument("kernel: K is not invariant under a listed permutation");
        }
      }
    }
  }
}

ComplexMatrix gns_factor(const KernelModel& model, double tol) {
  validate_kernel(model, tol);
  const HermitianEigen eig = hermitian_eigen(model.K);
  const RealVector root = eig.values.cwiseMax(0.0).cwiseSqrt();
  return root.asDiagonal() * eig.vectors.adjoint();
}

ComplexMatrix gns_representation(const KernelModel& model, const std::vector<int>& perm, double tol) {
  const ComplexMatrix f = gns_factor(model, tol);
  check_perm(perm, model.size());
  ComplexMatrix moved(f.rows(), f.cols());
  for (int j = 0; j < model.size(); ++j) moved.col(j) = f.col(perm[j]);
  // U maps span{lambda} onto itself and acts as the identity on the complement.
  const Eigen::CompleteOrthogonalDecomposition<ComplexMatrix> cod(f);
  const ComplexMatrix pinv = cod.pseudoInverse();
  const ComplexMatrix proj = f * pinv;
  const ComplexMatrix id = ComplexMatrix::Identity(f.rows(), f.rows());
  return moved * pinv + (id - proj);
}

double vacuum_field_variance(const ComplexVector& z, const KernelModel& model) {
  if (z.size() != model.size()) throw InvalidArgument("vacuum_field_variance: length mismatch");
  return std::max(0.0, 0.5 * z.dot(model.K * z).real());
}

double LevyLaw::mean() const {
  double total = 0.0;
  for (const auto& a : atoms) total += a.x * a.mass;
  return total;
}

double LevyLaw::variance() const {
  double total = 0.0;
  for (const auto& a : atoms) total += a.x * a.x * a.mass;
  return total;
}

cplx LevyLaw::characteristic(double t) const {
  cplx exponent = 0.0;
  for (const auto& a : atoms) exponent += (std::exp(cplx(0.0, t * a.x)) - 1.0) * a.mass;
  return std::exp(exponent);
}

FieldLaw coherent_gaussian_field(const ComplexVector& u0, const std::vector<ComplexVector>& us,
                                 FieldFamily family, double tol) {
  const auto k = static_cast<Eigen::Index>(us.size());
  if (k == 0) throw InvalidArgument("coherent_gaussian_field: no test vectors");
  for (const auto& u : us) {
    if (u.size() != u0.size()) throw InvalidArgument("coherent_gaussian_field: length mismatch");
  }
  FieldLaw law{RealVector(k), RealMatrix(k, k)};
  for (Eigen::Index i = 0; i < k; ++i) {
    const cplx overlap = u0.dot(us[i]);
    law.mean(i) = family == FieldFamily::momentum ? -2.0 * overlap.imag() : 2.0 * overlap.real();
    for (Eigen::Index j = 0; j < k; ++j) {
      const cplx g = us[i].dot(us[j]);
      if (std::abs(g.imag()) > tol * (1.0 + std::abs(g))) {
        throw InvalidArgument("coherent_gaussian_field: Gram matrix has complex entries");
      }
      law.covariance(i, j) = g.real();
    }
  }
  return law;
}

LevyLaw levy_law(const ComplexMatrix& h, const ComplexVector& u, double tol) {
  if (h.rows() != h.cols() || h.rows() != u.size()) throw InvalidArgument("levy_law: shape mismatch");
  if (hermiticity_defect(h) > tol * (1.0 + max_abs(h)) + 1e-14) {
    throw InvalidArgument("levy_law: H is not Hermitian");
  }
  const HermitianEigen eig = hermitian_eigen(h);
  LevyLaw law;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    const double mass = std::norm(eig.vectors.col(k).dot(u));
    if (mass > 0.0) law.atoms.push_back({eig.values(k), mass});
  }
  return law;
}

RealMatrix sample(const FieldLaw& law, int count, std::uint64_t seed, std::uint64_t stream) {
  if (count < 1) throw InvalidArgument("sample: count must be >= 1");
  const auto k = law.mean.size();
  if (law.covariance.rows() != k || law.covariance.cols() != k) {
    throw InvalidArgument("sample: covariance shape mismatch");
  }
  const RealMatrix cov = 0.5 * (law.covariance + law.covariance.transpose());
  const SymmetricEigen eig = symmetric_eigen(cov);
  if (eig.values.size() > 0 && eig.values.minCoeff() < -kPsdRepairTol) {
    throw InvalidArgument("sample: covariance is indefinite beyond repair tolerance");
  }
  const RealMatrix repaired =
      eig.vectors * eig.values.cwiseMax(0.0).asDiagonal() * eig.vectors.transpose();
  RealMatrix factor;
  const Eigen::LLT<RealMatrix> llt(repaired);
  if (llt.info() == Eigen::Success) {
    factor = llt.matrixL();
  } else {
    // Singular after repair: the symmetric square root is an equally valid factor.
    factor = eig.vectors * eig.values.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }
  auto rng = make_rng(seed, stream);
  std::normal_distribution<double> normal(0.0, 1.0);
  RealMatrix draws(count, k);
  RealVector xi(k);
  for (int r = 0; r < count; ++r) {
    for (Eigen::Index j = 0; j < k; ++j) xi(j) = normal(rng);
    draws.row(r) = (law.mean + factor * xi).transpose();
  }
  return draws;
}

RealVector sample(const LevyLaw& law, int count, std::uint64_t seed, std::uint64_t stream) {
  if (count < 1) throw InvalidArgument("sample: count must be >= 1");
  for (const auto& a : law.atoms) {
    if (!(a.mass >= 0.0) || !std::isfinite(a.x)) throw InvalidArgument("sample: invalid Levy atom");
  }
  auto rng = make_rng(seed, stream);
  std::vector<std::poisson_distribution<long>> counts;
  for (const auto& a : law.atoms) counts.emplace_back(a.mass);
  RealVector draws = RealVector::Zero(count);
  for (int r = 0; r < count; ++r) {
    for (std::size_t k = 0; k < law.atoms.size(); ++k) {
      if (law.atoms[k].mass > 0.0) draws(r) += law.atoms[k].x * static_cast<double>(counts[k](rng));
    }
  }
  return draws;
}

RealVector sample_mean(const RealMatrix& draws) {
  if (draws.rows() == 0) throw InvalidArgument("sample_mean: no draws");
  return draws.colwise().mean().transpose();
}

RealMatrix sample_covariance(const RealMatrix& draws) {
  if (draws.rows() < 2) throw InvalidArgument("sample_covariance: need at least two draws");
  const RealMatrix centered = draws.rowwise() - draws.colwise().mean();
  return centered.transpose() * centered / static_cast<double>(draws.rows() - 1);
}

cplx empirical_characteristic(const RealVector& draws, double t) {
  if (draws.size() == 0) throw InvalidArgument("empirical_characteristic: no draws");
  cplx total = 0.0;
  for (Eigen::Index i = 0; i < draws.size(); ++i) total += std::exp(cplx(0.0, t * draws(i)));
  return total / static_cast<double>(draws.size());
}

void write_samples_csv(std::ostream& os, const RealMatrix& draws, const std::string& prefix) {
  for (Eigen::Index j = 0; j < draws.cols(); ++j) os << (j ? "," : "") << prefix << '_' << j + 1;
  os << '\n' << std::setprecision(17);
  for (Eigen::Index r = 0; r < draws.rows(); ++r) {
    for (Eigen::Index j = 0; j < draws.cols(); ++j) os << (j ? "," : "") << draws(r, j);
    os << '\n';
  }
}

}  // namespace qfl
