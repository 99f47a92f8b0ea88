#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "qfl/dilation.hpp"
#include "qfl/error.hpp"
#include "qfl/fock.hpp"
#include "support.hpp"

using namespace qfl;

namespace {

ComplexMatrix dense(const SparseMatrix& m) { return ComplexMatrix(m); }

ComplexVector scalar_vec(cplx c) {
  ComplexVector v(1);
  v(0) = c;
  return v;
}

}  // namespace

TEST_CASE("Fock representation layout and cap") {
  const FockRep rep(2, 5);
  CHECK(rep.dim() == 25);
  // Mode 0 is the most significant digit.
  CHECK(rep.occupation(7, 0) == 1);
  CHECK(rep.occupation(7, 1) == 2);
  CHECK_THROWS_AS(FockRep(3, 20), DimensionCapExceeded);
  CHECK_NOTHROW(FockRep(3, 20, 8000));
  CHECK_THROWS_AS(FockRep(1, 1), InvalidArgument);
}

TEST_CASE("canonical commutator away from the top level") {
  const FockRep rep(2, 8);
  for (int j = 0; j < 2; ++j) {
    const ComplexMatrix comm = dense(rep.a(j)) * dense(rep.adag(j)) - dense(rep.adag(j)) * dense(rep.a(j));
    for (Eigen::Index idx = 0; idx < rep.dim(); ++idx) {
      if (rep.occupation(idx, j) < 7) CHECK(std::abs(comm(idx, idx) - 1.0) < 1e-14);
    }
  }
  // Different modes commute exactly.
  const ComplexMatrix cross = dense(rep.a(0)) * dense(rep.adag(1)) - dense(rep.adag(1)) * dense(rep.a(0));
  CHECK(max_abs(cross) < 1e-15);
}

TEST_CASE("a(u) is antilinear and a^dag(u) linear") {
  const FockRep rep(1, 6);
  const ComplexVector u = scalar_vec(cplx(0.3, 0.4));
  CHECK(max_abs(ComplexMatrix(dense(rep.annihilation(u)) - std::conj(u(0)) * dense(rep.a(0)))) < 1e-15);
  CHECK(max_abs(ComplexMatrix(dense(rep.creation(u)) - dense(rep.annihilation(u)).adjoint())) < 1e-15);
}

TEST_CASE("Weyl relations on the truncated space") {
  const FockRep rep(1, 40);
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexVector u = testing::random_in_ball(1, 1.0, rng);
    const ComplexVector v = testing::random_in_ball(1, 1.0, rng);
    const ComplexMatrix lhs = weyl_matrix(rep, u) * weyl_matrix(rep, v);
    const ComplexMatrix rhs = std::exp(cplx(0.0, -u.dot(v).imag())) * weyl_matrix(rep, ComplexVector(u + v));
    CHECK(max_abs(ComplexMatrix((lhs - rhs).topLeftCorner(10, 10))) < 1e-6);
    // Exponential vectors e(u) = exp(|u|^2/2) psi(u).
    const ComplexVector eu = std::exp(0.5 * u.squaredNorm()) * coherent_vector(rep, u);
    const ComplexVector ev = std::exp(0.5 * v.squaredNorm()) * coherent_vector(rep, v);
    CHECK(std::abs(eu.dot(ev) - std::exp(u.dot(v))) < 1e-6);
    CHECK(weyl_leakage(rep, u) < 1e-12);
  }
}

TEST_CASE("coherent vectors are annihilation eigenvectors") {
  const FockRep rep(2, 20);
  ComplexVector alpha(2);
  alpha << cplx(0.4, -0.2), cplx(-0.1, 0.6);
  const ComplexVector psi = coherent_vector(rep, alpha);
  CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
  for (int j = 0; j < 2; ++j) CHECK((rep.a(j) * psi - alpha(j) * psi).norm() < 1e-8);
  CHECK((weyl_matrix(rep, alpha).col(0) - psi).norm() < 1e-10);
}

TEST_CASE("density matrix validation") {
  ComplexMatrix rho = ComplexMatrix::Zero(2, 2);
  rho(0, 0) = 0.5;
  rho(1, 1) = 0.5;
  CHECK_NOTHROW(DensityMatrix{rho});
  ComplexMatrix notrace = rho * 2.0;
  CHECK_THROWS_AS(DensityMatrix{notrace}, InvalidArgument);
  ComplexMatrix nonherm = rho;
  nonherm(0, 1) = 0.3;
  CHECK_THROWS_AS(DensityMatrix{nonherm}, InvalidArgument);
  ComplexMatrix neg = ComplexMatrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix{neg}, InvalidArgument);
}

TEST_CASE("prepared Gaussian states reproduce their moments") {
  const FockRep rep(1, 40);
  ComplexVector alpha = scalar_vec(cplx(0.8, -0.5));
  const GaussianState c = coherent(alpha);
  Moments mom = state_moments(rep, gaussian_density(rep, c));
  CHECK(std::abs(mom.l(0) - c.l()(0)) < 1e-10);
  CHECK(std::abs(mom.m(0) - c.m()(0)) < 1e-10);
  CHECK(max_abs(RealMatrix(mom.S - c.S())) < 1e-10);

  const GaussianState thermal(c.l(), c.m(), RealMatrix(0.9 * RealMatrix::Identity(2, 2)));
  mom = state_moments(rep, gaussian_density(rep, thermal));
  CHECK(max_abs(RealMatrix(mom.S - thermal.S())) < 1e-9);
  CHECK(std::abs(mom.m(0) - thermal.m()(0)) < 1e-9);

  RealMatrix squeezed = RealMatrix::Zero(2, 2);
  squeezed(0, 0) = 1.0;
  squeezed(1, 1) = 0.25;
  CHECK_THROWS_AS(gaussian_density(rep, GaussianState(c.l(), c.m(), squeezed)), InvalidArgument);
}

TEST_CASE("attenuation master equation") {
  const FockRep rep(1, 25);
  const QuasifreePair p = pair_from_coupling(scalar_vec(1.0), scalar_vec(0.0));
  const DilationSpec spec = decompose(p);
  const ComplexVector alpha = scalar_vec(1.0);
  const DensityMatrix rho0 = DensityMatrix::pure(coherent_vector(rep, alpha));
  const DensityMatrix rho = lindblad_evolve(rep, rho0, spec, 1.0, 500);
  const ComplexVector expected = coherent_vector(rep, ComplexVector(alpha * std::exp(-0.5)));
  CHECK(std::abs(rho.matrix().trace() - 1.0) < 1e-10);
  CHECK(std::abs(expected.dot(rho.matrix() * expected) - 1.0) < 1e-8);
}

TEST_CASE("Lindblad generator annihilates the identity") {
  const FockRep rep(2, 6);
  std::mt19937_64 rng(32);
  const auto draw = testing::random_pair(2, rng);
  const LindbladOperators ops = lindblad_operators(rep, decompose(draw.pair));
  const ComplexMatrix id = ComplexMatrix::Identity(rep.dim(), rep.dim());
  CHECK(max_abs(heisenberg_generator(ops, id)) < 1e-12);
}

namespace {

// <psi(a)| theta(W(z)) |psi(b)> against <psi(a)| (a^dag(g) - a(g) + s) W(z) |psi(b)>.
double generator_gap(const FockRep& rep, const QuasifreePair& pair, const ComplexVector& z,
                     const ComplexVector& a, const ComplexVector& b) {
  const LindbladOperators ops = lindblad_operators(rep, decompose(pair));
  const ComplexMatrix w = weyl_matrix(rep, z);
  const ComplexMatrix lhs = heisenberg_generator(ops, w);
  const GeneratorCoefficients gen = generator_action(pair, z);
  const ComplexMatrix id = ComplexMatrix::Identity(rep.dim(), rep.dim());
  const ComplexMatrix rhs =
      (dense(rep.creation(gen.gain_vector)) - dense(rep.annihilation(gen.gain_vector)) + gen.scalar_part * id) * w;
  const ComplexVector pa = coherent_vector(rep, a);
  const ComplexVector pb = coherent_vector(rep, b);
  return std::abs(pa.dot(lhs * pb) - pa.dot(rhs * pb));
}

}  // namespace

TEST_CASE("master equation generator equals the quasifree generator, one mode (property)") {
  const FockRep rep(1, 40);
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    const auto draw = testing::random_pair(1, rng);
    const ComplexVector z = testing::random_in_ball(1, 1.0, rng);
    const ComplexVector a = testing::random_in_ball(1, 0.8, rng);
    const ComplexVector b = testing::random_in_ball(1, 0.8, rng);
    CHECK(generator_gap(rep, draw.pair, z, a, b) < 1e-6);
  }
}

TEST_CASE("master equation generator equals the quasifree generator, two modes (property)") {
  const FockRep rep(2, 16);
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 4; ++trial) {
    const auto draw = testing::random_pair(2, rng);
    const ComplexVector z = testing::random_in_ball(2, 0.5, rng);
    const ComplexVector a = testing::random_in_ball(2, 0.4, rng);
    const ComplexVector b = testing::random_in_ball(2, 0.4, rng);
    CHECK(generator_gap(rep, draw.pair, z, a, b) < 1e-6);
  }
}

TEST_CASE("oracle agrees with the closed form for attenuation") {
  const QuasifreePair p = pair_from_coupling(scalar_vec(1.0), scalar_vec(0.0));
  OracleOptions opts;
  opts.cutoff = 20;
  opts.steps_per_unit = 400;
  const auto reports = oracle_trajectory(coherent(scalar_vec(1.0)), p, {0.0, 0.5}, opts);
  REQUIRE(reports.size() == 2);
  for (const auto& r : reports) {
    CHECK(r.mean_error < 1e-8);
    CHECK(r.cov_error < 1e-8);
    CHECK(r.weyl_error < 1e-8);
    CHECK(r.leakage < kTrustedLeakage);
  }
}

TEST_CASE("oracle refuses leaky truncations") {
  const QuasifreePair p = pair_from_coupling(scalar_vec(1.0), scalar_vec(0.0));
  OracleOptions opts;
  opts.cutoff = 8;
  CHECK_THROWS_AS(oracle_compare(coherent(scalar_vec(3.0)), p, 0.1, opts), TruncationLeakage);
}

TEST_CASE("lindblad trajectory requires nondecreasing times") {
  const FockRep rep(1, 6);
  const DilationSpec spec = decompose(pair_from_coupling(scalar_vec(1.0), scalar_vec(0.0)));
  const DensityMatrix rho0 = DensityMatrix::pure(coherent_vector(rep, scalar_vec(0.1)));
  CHECK_THROWS_AS(lindblad_trajectory(rep, rho0, spec, {1.0, 0.5}), InvalidArgument);
}

TEST_CASE("moment CSV layout") {
  std::ostringstream os;
  const Moments m{RealVector::Zero(1), RealVector::Ones(1), RealMatrix(0.5 * RealMatrix::Identity(2, 2))};
  write_moment_csv(os, {0.0, 1.0}, {m, m});
  std::istringstream in(os.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,l_1,m_1,S_1_1,S_1_2,S_2_1,S_2_2");
  std::string row;
  std::getline(in, row);
  CHECK(row == "0,0,1,0.5,0,0,0.5");
}

TEST_CASE("squeezing residual converges only with a larger cutoff") {
  // Weak attenuation plus the unit-norm squeezer K' = -J diag(1, -1): coherent(1)
  // is squeezed by r = 1 at t = 1 and needs far more than 30 levels.
  const QuasifreePair c = pair_from_coupling(scalar_vec(0.1), scalar_vec(0.0));
  RealMatrix n(2, 2);
  n << 1, 0, 0, -1;
  const QuasifreePair pair(RealMatrix(c.K() - symplectic_form(1) * n), c.C());
  OracleOptions opts;
  opts.cutoff = 30;
  CHECK_THROWS_AS(oracle_compare(coherent(scalar_vec(1.0)), pair, 1.0, opts), TruncationLeakage);
  opts.cutoff = 80;
  const OracleReport r = oracle_compare(coherent(scalar_vec(1.0)), pair, 1.0, opts);
  CHECK(r.mean_error < 1e-4);
  CHECK(r.cov_error < 1e-4);
  CHECK(r.weyl_error < 1e-4);
}
