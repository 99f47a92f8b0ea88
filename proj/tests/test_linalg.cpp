#include <doctest.h>

#include <cmath>
#include <random>

#include "qfl/error.hpp"
#include "qfl/linalg.hpp"
#include "support.hpp"

using namespace qfl;

TEST_CASE("symplectic form") {
  const RealMatrix j = symplectic_form(1);
  RealMatrix expected(2, 2);
  expected << 0, -1, 1, 0;
  CHECK(j == expected);
  const RealMatrix j3 = symplectic_form(3);
  CHECK(max_abs(RealMatrix(j3 * j3 + RealMatrix::Identity(6, 6))) == 0.0);
  CHECK(max_abs(RealMatrix(j3.transpose() + j3)) == 0.0);
  CHECK_THROWS_AS(symplectic_form(0), InvalidArgument);
}

TEST_CASE("real embedding round trip") {
  ComplexVector z(2);
  z << cplx(1, 2), cplx(-3, 0.5);
  const RealVector x = real_embed(z);
  REQUIRE(x.size() == 4);
  CHECK(x(0) == 1.0);
  CHECK(x(1) == -3.0);
  CHECK(x(2) == 2.0);
  CHECK(x(3) == 0.5);
  CHECK((real_extract(x) - z).norm() == 0.0);
  CHECK_THROWS_AS(real_extract(RealVector::Zero(3)), InvalidArgument);
}

TEST_CASE("psd check") {
  CHECK(psd_check(RealMatrix(RealMatrix::Identity(3, 3))).is_psd);
  RealMatrix d = RealMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -1.0;
  const PsdReport rep = psd_check(d);
  CHECK_FALSE(rep.is_psd);
  CHECK(rep.min_eigenvalue == doctest::Approx(-1.0));

  // Boundary: I + iJ has eigenvalues 0 and 2.
  const ComplexMatrix h = ComplexMatrix::Identity(2, 2) + cplx(0, 1) * symplectic_form(1).cast<cplx>();
  const PsdReport edge = psd_check(h);
  CHECK(edge.is_psd);
  CHECK(std::abs(edge.min_eigenvalue) < 1e-14);

  RealMatrix asym = RealMatrix::Identity(2, 2);
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(psd_check(asym), InvalidArgument);
}

TEST_CASE("eigen decompositions are sorted descending") {
  std::mt19937_64 rng(11);
  const RealMatrix a = testing::random_symmetric(5, rng);
  const SymmetricEigen e = symmetric_eigen(a);
  for (int i = 1; i < 5; ++i) CHECK(e.values(i - 1) >= e.values(i));
  CHECK(max_abs(RealMatrix(e.vectors * e.values.asDiagonal() * e.vectors.transpose() - a)) < 1e-12);
}

TEST_CASE("expm") {
  CHECK(max_abs(RealMatrix(expm(RealMatrix(RealMatrix::Zero(3, 3))) - RealMatrix::Identity(3, 3))) == 0.0);
  const double theta = 0.7;
  const RealMatrix rot = expm(RealMatrix(symplectic_form(1) * theta));
  RealMatrix expected(2, 2);
  expected << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  CHECK(max_abs(RealMatrix(rot - expected)) < 1e-14);

  ComplexMatrix h(1, 1);
  h(0, 0) = cplx(0.0, 1.3);
  CHECK(std::abs(expm(h)(0, 0) - std::exp(cplx(0.0, 1.3))) < 1e-14);
}

TEST_CASE("gram integral closed forms") {
  const RealMatrix id = RealMatrix::Identity(2, 2);
  // K = 0: B_t = t C.
  CHECK(max_abs(RealMatrix(gram_integral(RealMatrix::Zero(2, 2), id, 1.7) - 1.7 * id)) < 1e-13);
  // K = -I/2, C = I: B_t = (1 - e^{-t}) I.
  for (double t : {0.0, 0.25, 1.0, 3.0}) {
    const RealMatrix b = gram_integral(RealMatrix(-0.5 * id), id, t);
    CHECK(max_abs(RealMatrix(b - (1.0 - std::exp(-t)) * id)) < 1e-13);
  }
  RealMatrix asym = id;
  asym(0, 1) = 1.0;
  CHECK_THROWS_AS(gram_integral(RealMatrix::Zero(2, 2), asym, 1.0), InvalidArgument);
  CHECK_THROWS_AS(gram_integral(RealMatrix::Zero(2, 2), id, -0.1), InvalidArgument);
}

TEST_CASE("gram integral composition law (property)") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 1 + trial % 3;
    const RealMatrix k = testing::random_symmetric(2 * n, rng) + testing::random_symplectic_generator(n, 1.0, rng);
    const RealMatrix g = testing::random_symmetric(2 * n, rng);
    const RealMatrix c = g * g.transpose();
    const double s = 0.3, t = 0.7;
    const RealMatrix as = expm(RealMatrix(s * k));
    const RealMatrix lhs = gram_integral(k, c, s + t);
    const RealMatrix rhs = gram_integral(k, c, s) + as.transpose() * gram_integral(k, c, t) * as;
    CHECK(max_abs(RealMatrix(lhs - rhs)) <= 1e-10 * (1.0 + max_abs(lhs)));
    CHECK(symmetry_defect(lhs) == 0.0);
  }
}
