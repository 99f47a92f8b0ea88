#include "qfl/ito.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace qfl::ito {

namespace {

constexpr cplx kI{0.0, 1.0};
const std::string kSqrtPrefix = "sqrt(";

bool is_sqrt_atom(const std::string& name) {
  return name.size() > kSqrtPrefix.size() + 1 && name.compare(0, kSqrtPrefix.size(), kSqrtPrefix) == 0 &&
         name.back() == ')';
}

std::string sqrt_argument(const std::string& name) {
  return name.substr(kSqrtPrefix.size(), name.size() - kSqrtPrefix.size() - 1);
}

// sqrt(x)^2 -> x until no square of a root atom remains.
Monomial reduce(Monomial mono) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = mono.begin(); it != mono.end(); ++it) {
      if (is_sqrt_atom(it->first) && it->second >= 2) {
        const std::string arg = sqrt_argument(it->first);
        it->second -= 2;
        if (it->second == 0) mono.erase(it);
        mono[arg] += 1;
        changed = true;
        break;
      }
    }
  }
  return mono;
}

std::string format_number(cplx c) {
  std::ostringstream os;
  os << std::setprecision(12);
  if (c.imag() == 0.0) {
    os << c.real();
  } else if (c.real() == 0.0) {
    os << c.imag() << "i";
  } else {
    os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
  }
  return os.str();
}

}  // namespace

Scalar::Scalar(cplx value) { add_term({}, value); }

Scalar Scalar::atom(const std::string& name) {
  Scalar s;
  s.add_term({{name, 1}}, 1.0);
  return s;
}

Scalar Scalar::sqrt_of(const std::string& name) { return atom(kSqrtPrefix + name + ")"); }

void Scalar::add_term(Monomial mono, cplx coeff) {
  if (coeff == cplx(0.0)) return;
  mono = reduce(std::move(mono));
  auto [it, inserted] = terms_.emplace(std::move(mono), coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == cplx(0.0)) terms_.erase(it);
  }
}

Scalar& Scalar::operator+=(const Scalar& other) {
  for (const auto& [mono, c] : other.terms_) add_term(mono, c);
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& other) {
  for (const auto& [mono, c] : other.terms_) add_term(mono, -c);
  return *this;
}

Scalar operator*(const Scalar& a, const Scalar& b) {
  Scalar out;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      Monomial mono = ma;
      for (const auto& [name, power] : mb) mono[name] += power;
      out.add_term(std::move(mono), ca * cb);
    }
  }
  return out;
}

Scalar Scalar::operator-() const {
  Scalar out;
  for (const auto& [mono, c] : terms_) out.add_term(mono, -c);
  return out;
}

bool Scalar::is_zero(double tol) const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [tol](const auto& term) { return std::abs(term.second) <= tol; });
}

Scalar Scalar::conjugate() const {
  Scalar out;
  for (const auto& [mono, c] : terms_) out.add_term(mono, std::conj(c));
  return out;
}

cplx Scalar::evaluate(const std::map<std::string, double>& values) const {
  cplx total = 0.0;
  for (const auto& [mono, c] : terms_) {
    cplx term = c;
    for (const auto& [name, power] : mono) {
      double base = 0.0;
      if (is_sqrt_atom(name)) {
        const auto it = values.find(sqrt_argument(name));
        if (it == values.end()) throw InvalidArgument("Scalar::evaluate: missing value for " + name);
        base = std::sqrt(it->second);
      } else {
        const auto it = values.find(name);
        if (it == values.end()) throw InvalidArgument("Scalar::evaluate: missing value for " + name);
        base = it->second;
      }
      term *= std::pow(base, power);
    }
    total += term;
  }
  return total;
}

std::string Scalar::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [mono, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    const bool unit = c == cplx(1.0);
    if (!unit || mono.empty()) os << format_number(c);
    bool first_atom = unit;
    for (const auto& [name, power] : mono) {
      if (!first_atom) os << "*";
      first_atom = false;
      os << name;
      if (power != 1) os << "^" << power;
    }
  }
  return os.str();
}

bool approx_equal(const Scalar& a, const Scalar& b, double tol) { return (a - b).is_zero(tol); }

SymbolicDifferential dt(int d) { return SymbolicDifferential::fundamental(d, {0, 0}, 1.0); }

namespace {
void check_colour(int d, int i) {
  if (i < 1 || i > d) throw InvalidArgument("ito: colour index must lie in 1..d");
}
}  // namespace

SymbolicDifferential annihilation(int d, int i) {
  check_colour(d, i);
  return SymbolicDifferential::fundamental(d, {0, i}, 1.0);
}

SymbolicDifferential creation(int d, int i) {
  check_colour(d, i);
  return SymbolicDifferential::fundamental(d, {i, 0}, 1.0);
}

SymbolicDifferential conservation(int d, int j, int i) {
  check_colour(d, i);
  check_colour(d, j);
  return SymbolicDifferential::fundamental(d, {j, i}, 1.0);
}

SymbolicDifferential quadrature(int d, int i) { return annihilation(d, i) + creation(d, i); }

SymbolicDifferential poisson(int d, int i) {
  const std::string name = "lambda_" + std::to_string(i);
  SymbolicDifferential out = quadrature(d, i).left_multiply(Scalar::sqrt_of(name));
  out += conservation(d, i, i);
  out += dt(d).left_multiply(Scalar::atom(name));
  return out;
}

SymbolicDifferential poisson(int d, int i, double intensity) {
  if (!(intensity > 0.0)) throw InvalidArgument("poisson: intensity must be positive");
  SymbolicDifferential out = quadrature(d, i).left_multiply(Scalar(std::sqrt(intensity)));
  out += conservation(d, i, i);
  out += dt(d).left_multiply(Scalar(intensity));
  return out;
}

std::string to_string(const SymbolicDifferential& dx) {
  if (dx.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [idx, c] : dx.terms()) {
    if (!first) os << " + ";
    first = false;
    const std::string coeff = c.to_string();
    if (coeff != "1") os << "(" << coeff << ") ";
    if (idx.lower == 0 && idx.upper == 0) {
      os << "dt";
    } else {
      os << "dLambda_" << idx.lower << "^" << idx.upper;
    }
  }
  return os.str();
}

namespace {

TableCheck build_table(std::vector<std::string> labels, std::vector<SymbolicDifferential> basis,
                       const std::vector<std::vector<SymbolicDifferential>>& expected) {
  TableCheck table;
  table.labels = std::move(labels);
  table.basis = std::move(basis);
  table.expected = expected;
  table.matches = true;
  for (std::size_t r = 0; r < table.basis.size(); ++r) {
    std::vector<SymbolicDifferential> row;
    for (std::size_t c = 0; c < table.basis.size(); ++c) {
      row.push_back(ito_product(table.basis[r], table.basis[c]));
      table.matches = table.matches && approx_equal(row.back(), expected[r][c]);
    }
    table.products.push_back(std::move(row));
  }
  return table;
}

}  // namespace

std::string TableCheck::render() const {
  auto name_of = [this](const SymbolicDifferential& cell) -> std::string {
    if (cell.empty()) return "0";
    for (std::size_t k = 0; k < basis.size(); ++k) {
      if (approx_equal(cell, basis[k])) return labels[k];
    }
    return to_string(cell);
  };
  std::vector<std::vector<std::string>> cells;
  std::size_t width = 0;
  for (const auto& l : labels) width = std::max(width, l.size());
  for (const auto& row : products) {
    std::vector<std::string> out;
    for (const auto& cell : row) {
      out.push_back(name_of(cell));
      width = std::max(width, out.back().size());
    }
    cells.push_back(std::move(out));
  }
  std::ostringstream os;
  auto pad = [width](const std::string& s) { return s + std::string(width - s.size(), ' '); };
  os << pad("") << " |";
  for (const auto& l : labels) os << ' ' << pad(l);
  os << '\n' << std::string(width + 1, '-') << '+' << std::string((width + 1) * labels.size(), '-')
     << '\n';
  for (std::size_t r = 0; r < cells.size(); ++r) {
    os << pad(labels[r]) << " |";
    for (const auto& cell : cells[r]) os << ' ' << pad(cell);
    os << '\n';
  }
  return os.str();
}

TableCheck quadrature_table(int d) {
  if (d < 1) throw InvalidArgument("quadrature_table: d must be >= 1");
  std::vector<std::string> labels;
  std::vector<SymbolicDifferential> basis;
  for (int i = 1; i <= d; ++i) {
    labels.push_back("dQ_" + std::to_string(i));
    basis.push_back(quadrature(d, i));
  }
  labels.push_back("dt");
  basis.push_back(dt(d));
  const SymbolicDifferential zero(d);
  std::vector<std::vector<SymbolicDifferential>> expected(d + 1, std::vector<SymbolicDifferential>(d + 1, zero));
  for (int i = 0; i < d; ++i) expected[i][i] = dt(d);
  return build_table(std::move(labels), std::move(basis), expected);
}

TableCheck poisson_table(int d) {
  if (d < 1) throw InvalidArgument("poisson_table: d must be >= 1");
  std::vector<std::string> labels;
  std::vector<SymbolicDifferential> basis;
  for (int i = 1; i <= d; ++i) {
    labels.push_back("dN_" + std::to_string(i));
    basis.push_back(poisson(d, i));
  }
  labels.push_back("dt");
  basis.push_back(dt(d));
  const SymbolicDifferential zero(d);
  std::vector<std::vector<SymbolicDifferential>> expected(d + 1, std::vector<SymbolicDifferential>(d + 1, zero));
  for (int i = 0; i < d; ++i) expected[i][i] = basis[i];
  return build_table(std::move(labels), std::move(basis), expected);
}

PoissonProductCheck poisson_product(int i, int j, double lambda_i, double lambda_j) {
  const int d = std::max(i, j);
  if (std::min(i, j) < 1) throw InvalidArgument("poisson_product: indices are 1-based");
  const SymbolicDifferential ni = poisson(d, i, lambda_i);
  const SymbolicDifferential nj = poisson(d, j, lambda_j);
  PoissonProductCheck check{ito_product(ni, nj), i == j ? nj : SymbolicDifferential(d), false};
  check.matches = approx_equal(check.product, check.expected);
  return check;
}

OperatorDifferential HPCoefficients::differential() const {
  OperatorDifferential out(d);
  for (int a = 0; a <= d; ++a) {
    for (int b = 0; b <= d; ++b) out.add({a, b}, L[a][b]);
  }
  return out;
}

UnitarityReport unitarity_report(const HPCoefficients& coeffs, double tol) {
  const int d = coeffs.d;
  UnitarityReport rep;
  double scale = 0.0;
  for (const auto& row : coeffs.L) {
    for (const auto& m : row) scale = std::max(scale, max_abs(m));
  }
  for (int a = 0; a <= d; ++a) {
    for (int b = 0; b <= d; ++b) {
      const ComplexMatrix base = coeffs.L[a][b] + coeffs.L[b][a].adjoint();
      ComplexMatrix first = base;
      ComplexMatrix second = base;
      for (int i = 1; i <= d; ++i) {
        first += coeffs.L[i][a].adjoint() * coeffs.L[i][b];
        second += coeffs.L[a][i] * coeffs.L[b][i].adjoint();
      }
      rep.first_residual = std::max(rep.first_residual, max_abs(first));
      rep.second_residual = std::max(rep.second_residual, max_abs(second));
    }
  }
  const double bound = tol * (1.0 + scale) * (1.0 + scale);
  rep.unitary = rep.first_residual <= bound && rep.second_residual <= bound;
  return rep;
}

bool unitarity_check(const HPCoefficients& coeffs, double tol) {
  return unitarity_report(coeffs, tol).unitary;
}

namespace {

struct Blocks {
  int d;
  Eigen::Index dim;
};

Blocks check_hp_inputs(const ComplexMatrix& s, const std::vector<ComplexMatrix>& ls,
                       const ComplexMatrix& h) {
  const int d = static_cast<int>(ls.size());
  if (d < 1) throw InvalidArgument("hp_coefficients: need at least one noise channel");
  const Eigen::Index dim = h.rows();
  if (h.cols() != dim || dim == 0) throw InvalidArgument("hp_coefficients: H must be square");
  for (const auto& l : ls) {
    if (l.rows() != dim || l.cols() != dim) throw InvalidArgument("hp_coefficients: L has wrong shape");
  }
  if (s.rows() != d * dim || s.cols() != d * dim) {
    throw InvalidArgument("hp_coefficients: S must be (d*dim) x (d*dim)");
  }
  if (hermiticity_defect(h) > 1e-10 * (1.0 + max_abs(h))) {
    throw InvalidArgument("hp_coefficients: H is not Hermitian");
  }
  const ComplexMatrix id = ComplexMatrix::Identity(s.rows(), s.cols());
  if (max_abs(ComplexMatrix(s.adjoint() * s - id)) > 1e-10 ||
      max_abs(ComplexMatrix(s * s.adjoint() - id)) > 1e-10) {
    throw InvalidArgument("hp_coefficients: S is not unitary");
  }
  return {d, dim};
}

ComplexMatrix block(const ComplexMatrix& s, Eigen::Index dim, int i, int j) {
  // S^i_j with 1-based colours.
  return s.block((i - 1) * dim, (j - 1) * dim, dim, dim);
}

}  // namespace

HPCoefficients hp_coefficients(const ComplexMatrix& s, const std::vector<ComplexMatrix>& ls,
                               const ComplexMatrix& h) {
  const auto [d, dim] = check_hp_inputs(s, ls, h);
  const ComplexMatrix id = ComplexMatrix::Identity(dim, dim);
  HPCoefficients out;
  out.d = d;
  out.system_dim = dim;
  out.L.assign(d + 1, std::vector<ComplexMatrix>(d + 1, ComplexMatrix::Zero(dim, dim)));
  ComplexMatrix decay = ComplexMatrix::Zero(dim, dim);
  for (const auto& l : ls) decay += l.adjoint() * l;
  out.L[0][0] = -(kI * h + 0.5 * decay);
  for (int i = 1; i <= d; ++i) {
    out.L[i][0] = ls[i - 1];
    for (int j = 1; j <= d; ++j) out.L[i][j] = block(s, dim, i, j) - (i == j ? id : ComplexMatrix::Zero(dim, dim));
  }
  for (int j = 1; j <= d; ++j) {
    for (int k = 1; k <= d; ++k) out.L[0][j] -= ls[k - 1].adjoint() * block(s, dim, k, j);
  }
  return out;
}

FlowGenerator flow_generator(const ComplexMatrix& s, const std::vector<ComplexMatrix>& ls,
                             const ComplexMatrix& h, const ComplexMatrix& x) {
  const auto [d, dim] = check_hp_inputs(s, ls, h);
  if (x.rows() != dim || x.cols() != dim) throw InvalidArgument("flow_generator: X has wrong shape");
  FlowGenerator out;
  out.d = d;
  out.theta.assign(d + 1, std::vector<ComplexMatrix>(d + 1, ComplexMatrix::Zero(dim, dim)));
  for (int i = 1; i <= d; ++i) {
    for (int j = 1; j <= d; ++j) {
      ComplexMatrix t = (i == j) ? ComplexMatrix(-x) : ComplexMatrix::Zero(dim, dim);
      for (int k = 1; k <= d; ++k) t += block(s, dim, k, i).adjoint() * x * block(s, dim, k, j);
      out.theta[i][j] = t;
    }
  }
  for (int i = 1; i <= d; ++i) {
    for (int k = 1; k <= d; ++k) {
      const ComplexMatrix& l = ls[k - 1];
      out.theta[i][0] += block(s, dim, k, i).adjoint() * (x * l - l * x);
      out.theta[0][i] += (l.adjoint() * x - x * l.adjoint()) * block(s, dim, k, i);
    }
  }
  ComplexMatrix lind = kI * (h * x - x * h);
  for (const auto& l : ls) {
    const ComplexMatrix ld = l.adjoint();
    lind -= 0.5 * (ld * l * x + x * ld * l - 2.0 * ld * x * l);
  }
  out.theta[0][0] = lind;
  return out;
}

FlowGenerator derived_flow_generator(const HPCoefficients& coeffs, const ComplexMatrix& x) {
  const OperatorDifferential du = coeffs.differential();
  const OperatorDifferential du_dag_x = du.adjoint().right_multiply(x);
  OperatorDifferential dj = du_dag_x;
  dj += du.left_multiply(x);
  dj += ito_product(du_dag_x, du);
  FlowGenerator out;
  out.d = coeffs.d;
  const auto dim = coeffs.system_dim;
  out.theta.assign(coeffs.d + 1, std::vector<ComplexMatrix>(coeffs.d + 1, ComplexMatrix::Zero(dim, dim)));
  for (const auto& [idx, c] : dj.terms()) out.theta[idx.lower][idx.upper] = c;
  return out;
}

}  // namespace qfl::ito

namespace qfl::ito {

namespace {
ComplexMatrix ginibre(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexMatrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = cplx(normal(rng), normal(rng));
  }
  return out;
}
}  // namespace

HPData random_hp_data(int d, Eigen::Index dim, std::mt19937_64& rng) {
  if (d < 1 || dim < 1) throw InvalidArgument("random_hp_data: sizes must be positive");
  const Eigen::Index big = d * dim;
  const Eigen::HouseholderQR<ComplexMatrix> qr(ginibre(big, big, rng));
  const ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(big, big);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  ComplexVector phases(big);
  for (Eigen::Index i = 0; i < big; ++i) {
    phases(i) = std::abs(r(i, i)) > 0.0 ? r(i, i) / std::abs(r(i, i)) : cplx(1.0);
  }
  HPData out;
  out.s = q * phases.asDiagonal();
  for (int k = 0; k < d; ++k) out.ls.push_back(ginibre(dim, dim, rng));
  const ComplexMatrix g = ginibre(dim, dim, rng);
  out.h = 0.5 * (g + g.adjoint());
  return out;
}

}  // namespace qfl::ito
