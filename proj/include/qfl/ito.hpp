#pragma once

// Quantum Ito algebra of the fundamental differentials dLambda_alpha^beta,
// alpha, beta in {0..d}: dLambda_0^i annihilation, dLambda_i^0 creation,
// dLambda_j^i conservation (type i -> type j), dLambda_0^0 = dt.
//
// Products follow dLambda_a^b dLambda_c^e = dhat(b, c) dLambda_a^e where
// dhat(b, c) = [b == c != 0]. Coefficients commute with the differentials.

#include <compare>
#include <map>
#include <random>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "qfl/error.hpp"
#include "qfl/linalg.hpp"

namespace qfl::ito {

/// Product of named real atoms with integer powers. An atom named "sqrt(x)"
/// squares to the atom "x".
using Monomial = std::map<std::string, int>;

/// Commutative polynomial in named real atoms with complex coefficients.
class Scalar {
 public:
  Scalar() = default;
  Scalar(cplx value);  // NOLINT: implicit promotion of numbers is intended
  Scalar(double value) : Scalar(cplx(value, 0.0)) {}

  static Scalar atom(const std::string& name);
  static Scalar sqrt_of(const std::string& name);

  Scalar& operator+=(const Scalar& other);
  Scalar& operator-=(const Scalar& other);
  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(const Scalar& a, const Scalar& b);
  Scalar operator-() const;

  bool is_zero(double tol = 1e-14) const;
  Scalar conjugate() const;
  /// Substitutes atom values; "sqrt(x)" evaluates to sqrt(values["x"]).
  cplx evaluate(const std::map<std::string, double>& values) const;
  std::string to_string() const;
  const std::map<Monomial, cplx>& terms() const { return terms_; }

 private:
  void add_term(Monomial mono, cplx coeff);
  std::map<Monomial, cplx> terms_;
};

bool approx_equal(const Scalar& a, const Scalar& b, double tol = 1e-12);

/// dLambda_lower^upper.
struct Index {
  int lower = 0;
  int upper = 0;
  auto operator<=>(const Index&) const = default;
};

inline bool coeff_is_zero(const Scalar& s) { return s.is_zero(); }
inline bool coeff_is_zero(const ComplexMatrix& m) { return m.size() == 0 || (m.array() == cplx(0.0)).all(); }
inline Scalar coeff_adjoint(const Scalar& s) { return s.conjugate(); }
inline ComplexMatrix coeff_adjoint(const ComplexMatrix& m) { return m.adjoint(); }
inline void check_coeff_product(const Scalar&, const Scalar&) {}
inline void check_coeff_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw InvalidArgument("ito: coefficient dimensions do not match");
}

/// Formal sum sum E_(a,b) dLambda_a^b with coefficients in a ring.
template <class Coeff>
class ItoDifferential {
 public:
  explicit ItoDifferential(int d) : d_(d) {
    if (d < 0) throw InvalidArgument("ItoDifferential: negative noise dimension");
  }

  static ItoDifferential fundamental(int d, Index idx, Coeff coeff) {
    ItoDifferential out(d);
    out.add(idx, std::move(coeff));
    return out;
  }

  int d() const { return d_; }
  const std::map<Index, Coeff>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  bool contains(Index idx) const { return terms_.count(idx) != 0; }

  const Coeff* coefficient(Index idx) const {
    const auto it = terms_.find(idx);
    return it == terms_.end() ? nullptr : &it->second;
  }

  void add(Index idx, const Coeff& coeff) {
    if (idx.lower < 0 || idx.upper < 0 || idx.lower > d_ || idx.upper > d_) {
      throw InvalidArgument("ItoDifferential: index out of range");
    }
    auto it = terms_.find(idx);
    if (it == terms_.end()) {
      if (!coeff_is_zero(coeff)) terms_.emplace(idx, coeff);
      return;
    }
    it->second = it->second + coeff;
    if (coeff_is_zero(it->second)) terms_.erase(it);
  }

  ItoDifferential& operator+=(const ItoDifferential& other) {
    check_same_d(other);
    for (const auto& [idx, c] : other.terms_) add(idx, c);
    return *this;
  }
  friend ItoDifferential operator+(ItoDifferential a, const ItoDifferential& b) { return a += b; }

  /// c * dX (coefficients multiplied on the left).
  ItoDifferential left_multiply(const Coeff& c) const {
    ItoDifferential out(d_);
    for (const auto& [idx, e] : terms_) {
      check_coeff_product(c, e);
      out.add(idx, c * e);
    }
    return out;
  }
  /// dX * c.
  ItoDifferential right_multiply(const Coeff& c) const {
    ItoDifferential out(d_);
    for (const auto& [idx, e] : terms_) {
      check_coeff_product(e, c);
      out.add(idx, e * c);
    }
    return out;
  }

  /// (E dLambda_a^b)^dag = E^dag dLambda_b^a.
  ItoDifferential adjoint() const {
    ItoDifferential out(d_);
    for (const auto& [idx, e] : terms_) out.add({idx.upper, idx.lower}, coeff_adjoint(e));
    return out;
  }

  void check_same_d(const ItoDifferential& other) const {
    if (other.d_ != d_) throw InvalidArgument("ItoDifferential: noise dimensions differ");
  }

 private:
  int d_;
  std::map<Index, Coeff> terms_;
};

using SymbolicDifferential = ItoDifferential<Scalar>;
using OperatorDifferential = ItoDifferential<ComplexMatrix>;

/// dX dY by the contraction rule; coefficients multiply in the order E F.
template <class Coeff>
ItoDifferential<Coeff> ito_product(const ItoDifferential<Coeff>& x, const ItoDifferential<Coeff>& y) {
  x.check_same_d(y);
  ItoDifferential<Coeff> out(x.d());
  for (const auto& [a, e] : x.terms()) {
    if (a.upper == 0) continue;
    for (const auto& [b, f] : y.terms()) {
      if (b.lower != a.upper) continue;
      check_coeff_product(e, f);
      out.add({a.lower, b.upper}, e * f);
    }
  }
  return out;
}

/// d(XY) = X dY + (dX) Y + dX dY for adapted-constant X, Y.
template <class Coeff>
ItoDifferential<Coeff> product_rule(const Coeff& x, const ItoDifferential<Coeff>& dx,
                                    const Coeff& y, const ItoDifferential<Coeff>& dy) {
  ItoDifferential<Coeff> out = dy.left_multiply(x);
  out += dx.right_multiply(y);
  out += ito_product(dx, dy);
  return out;
}

template <class Coeff>
bool approx_equal(const ItoDifferential<Coeff>& a, const ItoDifferential<Coeff>& b, double tol = 1e-12) {
  if (a.d() != b.d()) return false;
  auto covered = [&](const ItoDifferential<Coeff>& p, const ItoDifferential<Coeff>& q) {
    for (const auto& [idx, c] : p.terms()) {
      const Coeff* other = q.coefficient(idx);
      if (other == nullptr) {
        if constexpr (std::is_same_v<Coeff, Scalar>) {
          if (!c.is_zero(tol)) return false;
        } else {
          if (max_abs(c) > tol) return false;
        }
      } else {
        if constexpr (std::is_same_v<Coeff, Scalar>) {
          if (!approx_equal(c, *other, tol)) return false;
        } else {
          if (c.rows() != other->rows() || c.cols() != other->cols() ||
              max_abs(ComplexMatrix(c - *other)) > tol) {
            return false;
          }
        }
      }
    }
    return true;
  };
  return covered(a, b) && covered(b, a);
}

// Fundamental differentials with unit coefficient.
SymbolicDifferential dt(int d);
SymbolicDifferential annihilation(int d, int i);         // dLambda_0^i
SymbolicDifferential creation(int d, int i);             // dLambda_i^0
SymbolicDifferential conservation(int d, int j, int i);  // dLambda_j^i: type i -> type j
/// dQ_i = dLambda_0^i + dLambda_i^0.
SymbolicDifferential quadrature(int d, int i);
/// dN_i = sqrt(lambda_i) dQ_i + dLambda_i^i + lambda_i dt with symbolic lambda_i.
SymbolicDifferential poisson(int d, int i);
/// Same with a numeric intensity.
SymbolicDifferential poisson(int d, int i, double intensity);

std::string to_string(const SymbolicDifferential& dx);

/// A multiplication table over a basis of differentials, with the classical
/// table it is expected to reproduce.
struct TableCheck {
  std::vector<std::string> labels;
  std::vector<SymbolicDifferential> basis;
  std::vector<std::vector<SymbolicDifferential>> products;  // row = left factor
  std::vector<std::vector<SymbolicDifferential>> expected;
  bool matches = false;
  /// Text grid with row = left factor; cells are named by basis label, "dt" or "0".
  std::string render() const;
};

/// Basis dQ_1..dQ_d, dt; expected dQ_i dQ_j = delta_ij dt, everything with dt zero.
TableCheck quadrature_table(int d);
/// Basis dN_1..dN_d, dt with symbolic intensities; expected dN_i dN_j = delta_ij dN_j.
TableCheck poisson_table(int d);

struct PoissonProductCheck {
  SymbolicDifferential product;
  SymbolicDifferential expected;
  bool matches = false;
};
/// dN_i dN_j for numeric intensities (1-based i, j).
PoissonProductCheck poisson_product(int i, int j, double lambda_i, double lambda_j);

/// Coefficients L^alpha_beta of dU = L^alpha_beta dLambda_alpha^beta U;
/// L[alpha][beta] multiplies dLambda_alpha^beta.
struct HPCoefficients {
  int d = 0;
  Eigen::Index system_dim = 0;
  std::vector<std::vector<ComplexMatrix>> L;

  OperatorDifferential differential() const;
};

struct UnitarityReport {
  bool unitary = false;
  double first_residual = 0.0;   // max over (a,b) of |L^a_b + (L^b_a)^dag + sum_i (L^i_a)^dag L^i_b|
  double second_residual = 0.0;  // max over (a,b) of |L^a_b + (L^b_a)^dag + sum_i L^a_i (L^b_i)^dag|
};

UnitarityReport unitarity_report(const HPCoefficients& coeffs, double tol);
bool unitarity_check(const HPCoefficients& coeffs, double tol);

/// S is the (d*dim)x(d*dim) unitary with block (i, j) = S^i_j; ls holds L_1..L_d.
HPCoefficients hp_coefficients(const ComplexMatrix& s, const std::vector<ComplexMatrix>& ls,
                               const ComplexMatrix& h);

struct HPData {
  ComplexMatrix s;
  std::vector<ComplexMatrix> ls;
  ComplexMatrix h;
};

/// Haar-like random unitary S (QR of a complex Ginibre matrix), Gaussian L_k
/// and a random Hermitian H, all with entries of order one.
HPData random_hp_data(int d, Eigen::Index dim, std::mt19937_64& rng);

/// theta[alpha][beta](X), the coefficient of dLambda_alpha^beta in dj_t(X).
struct FlowGenerator {
  int d = 0;
  std::vector<std::vector<ComplexMatrix>> theta;
};

/// Closed-form branches:
///   theta^i_j = sum_k (S^k_i)^dag X S^k_j - delta_ij X
///   theta^i_0 = sum_k (S^k_i)^dag [X, L_k]
///   theta^0_j = sum_k [L_k^dag, X] S^k_j
///   theta^0_0 = i[H, X] - 1/2 sum_k (L_k^dag L_k X + X L_k^dag L_k - 2 L_k^dag X L_k)
FlowGenerator flow_generator(const ComplexMatrix& s, const std::vector<ComplexMatrix>& ls,
                             const ComplexMatrix& h, const ComplexMatrix& x);

/// The same maps obtained by expanding d(U^dag X U) = dU^dag X + X dU + dU^dag X dU
/// with the Ito product at U = I.
FlowGenerator derived_flow_generator(const HPCoefficients& coeffs, const ComplexMatrix& x);

}  // namespace qfl::ito
