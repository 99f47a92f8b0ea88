#include <doctest.h>

#include <cmath>
#include <random>

#include "qfl/dilation.hpp"
#include "qfl/error.hpp"
#include "support.hpp"

using namespace qfl;

namespace {

ComplexVector unit(int n, int j) {
  ComplexVector e = ComplexVector::Zero(n);
  e(j) = 1.0;
  return e;
}

}  // namespace

TEST_CASE("single attenuation channel") {
  const QuasifreePair p = pair_from_coupling(unit(1, 0), ComplexVector::Zero(1));
  CHECK(max_abs(RealMatrix(p.K() + 0.5 * RealMatrix::Identity(2, 2))) < 1e-15);
  CHECK(max_abs(RealMatrix(p.C() - RealMatrix::Identity(2, 2))) < 1e-15);
}

TEST_CASE("single amplification channel") {
  // L = a^dag: K = +I/2, C = I.
  const QuasifreePair p = pair_from_coupling(ComplexVector::Zero(1), unit(1, 0));
  CHECK(max_abs(RealMatrix(p.K() - 0.5 * RealMatrix::Identity(2, 2))) < 1e-15);
  CHECK(max_abs(RealMatrix(p.C() - RealMatrix::Identity(2, 2))) < 1e-15);
}

TEST_CASE("coupling pair matches its defining relations (property)") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 3;
    const ComplexVector u = testing::random_complex(n, rng);
    const ComplexVector v = testing::random_complex(n, rng);
    const QuasifreePair p = pair_from_coupling(u, v);
    const ComplexVector beta = coupling_vector(u, v);
    // R^{-1} K R z = (conj(lambda(z)) v - lambda(z) u) / 2.
    const ComplexVector z = testing::random_complex(n, rng);
    const cplx lam = lambda_form(u, v, z);
    const ComplexVector expected = 0.5 * (std::conj(lam) * v - lam * u);
    CHECK((real_extract(p.K() * real_embed(z)) - expected).norm() < 1e-13);
    // D = beta beta^H.
    CHECK(max_abs(ComplexMatrix(noise_matrix(p.K(), p.C()) - beta * beta.adjoint())) < 1e-13);
    // J K is skew.
    const RealMatrix jk = symplectic_form(n) * p.K();
    CHECK(max_abs(RealMatrix(jk + jk.transpose())) < 1e-14);
  }
}

TEST_CASE("coupling K is half of the bare outer-product form") {
  // The expression -J Im(beta beta^H) without the factor one half would double
  // the drift and break D = beta beta^H; pin the factor.
  std::mt19937_64 rng(22);
  const ComplexVector u = testing::random_complex(2, rng);
  const ComplexVector v = testing::random_complex(2, rng);
  const ComplexVector beta = coupling_vector(u, v);
  const RealMatrix bare = -symplectic_form(2) * (beta * beta.adjoint()).imag();
  const QuasifreePair p = pair_from_coupling(u, v);
  CHECK(max_abs(RealMatrix(2.0 * p.K() - bare)) < 1e-14);
  CHECK_FALSE(admissible(bare, p.C()).admissible);
}

TEST_CASE("decompose attenuation") {
  const QuasifreePair p = pair_from_coupling(unit(1, 0), ComplexVector::Zero(1));
  const DilationSpec spec = decompose(p);
  REQUIRE(spec.lindblad.size() == 1);
  CHECK(spec.hamiltonian.empty());
  CHECK(std::abs(std::abs(spec.lindblad[0].u()(0)) - 1.0) < 1e-14);
  CHECK(spec.lindblad[0].v().norm() < 1e-14);
  CHECK(max_abs(spec.k_prime) < 1e-14);
  const DilationReport rep = dilation_report(spec);
  CHECK(rep.noise_dimension == 1);
  CHECK_FALSE(rep.pure_hamiltonian);
}

TEST_CASE("decompose a pure Hamiltonian pair") {
  std::mt19937_64 rng(23);
  const RealMatrix kp = testing::random_symplectic_generator(2, 0.8, rng);
  const DilationSpec spec = decompose(QuasifreePair(kp, RealMatrix::Zero(4, 4)));
  CHECK(spec.lindblad.empty());
  CHECK(max_abs(RealMatrix(spec.k_prime - kp)) < 1e-14);
  CHECK(spec.hamiltonian.size() == 4);
  const DilationReport rep = dilation_report(spec);
  CHECK(rep.pure_hamiltonian);
  CHECK_FALSE(rep.trivial);
  CHECK(rep.summary.find("Schr") != std::string::npos);
}

TEST_CASE("decompose the zero pair") {
  const DilationSpec spec = decompose(QuasifreePair(RealMatrix::Zero(2, 2), RealMatrix::Zero(2, 2)));
  CHECK(spec.lindblad.empty());
  CHECK(spec.hamiltonian.empty());
  CHECK(dilation_report(spec).trivial);
}

TEST_CASE("decompose rejects a nonpositive rank tolerance") {
  CHECK_THROWS_AS(decompose(pair_from_coupling(unit(1, 0), unit(1, 0)), 0.0), InvalidArgument);
}

TEST_CASE("lindblad term round trip") {
  std::mt19937_64 rng(24);
  const ComplexVector u = testing::random_complex(3, rng);
  const ComplexVector v = testing::random_complex(3, rng);
  const LindbladTerm t = LindbladTerm::from_coupling(u, v);
  CHECK((t.u() - u).norm() < 1e-14);
  CHECK((t.v() - v).norm() < 1e-14);
}

TEST_CASE("decomposition round trip (property)") {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 2;
    const auto draw = testing::random_pair(n, rng);
    const DilationSpec spec = decompose(draw.pair);
    const DecompositionResiduals r = reconstruction_residuals(spec);
    CHECK(r.c_residual <= 1e-10);
    CHECK(r.k_residual <= 1e-10);
    CHECK(r.symplectic_defect <= 1e-12);
    CHECK(r.hamiltonian_residual <= 1e-10);
    CHECK(static_cast<int>(spec.lindblad.size()) <= 2 * n);
    const QuasifreePair back = reconstruct_pair(spec);
    CHECK(max_abs(RealMatrix(back.K() - draw.pair.K())) <= 1e-10);
    CHECK(max_abs(RealMatrix(back.C() - draw.pair.C())) <= 1e-10);
  }
}

TEST_CASE("noise rank equals the rank of D") {
  std::mt19937_64 rng(26);
  for (int r = 1; r <= 4; ++r) {
    const auto draw = testing::random_pair(2, rng, r);
    CHECK(static_cast<int>(decompose(draw.pair).lindblad.size()) == r);
  }
}

TEST_CASE("Hamiltonian action is the generator of the residual (property)") {
  std::mt19937_64 rng(27);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 3;
    const auto draw = testing::random_pair(n, rng);
    const DilationSpec spec = decompose(draw.pair);
    const ComplexVector z = testing::random_complex(n, rng);
    const GeneratorCoefficients h = hamiltonian_action(spec.hamiltonian, spec.k_prime, z);
    const GeneratorCoefficients g =
        generator_action(QuasifreePair(spec.k_prime, RealMatrix::Zero(2 * n, 2 * n)), z);
    CHECK((h.gain_vector - g.gain_vector).norm() < 1e-10);
    CHECK(std::abs(h.scalar_part - g.scalar_part) < 1e-10);
  }
}

TEST_CASE("hamiltonian_action rejects inconsistent data") {
  std::mt19937_64 rng(28);
  const RealMatrix kp = testing::random_symplectic_generator(1, 1.0, rng);
  const DilationSpec spec = decompose(QuasifreePair(kp, RealMatrix::Zero(2, 2)));
  CHECK_THROWS_AS(hamiltonian_action(spec.hamiltonian, RealMatrix(2.0 * kp), ComplexVector::Ones(1)),
                  InvalidArgument);
}
