#include "qfl/dilation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qfl/error.hpp"

namespace qfl {

namespace {

constexpr cplx kI{0.0, 1.0};

void check_same_length(const ComplexVector& u, const ComplexVector& v, const char* where) {
  if (u.size() != v.size() || u.size() == 0) {
    throw InvalidArgument(std::string(where) + ": u and v must be nonempty of equal length");
  }
}

// Rotates v so that its first component of non-negligible size is real positive.
ComplexVector fix_phase(ComplexVector v) {
  const double scale = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-8 * scale) {
      v *= std::conj(v(i)) / std::abs(v(i));
      break;
    }
  }
  return v;
}

RealMatrix k_from_beta(const ComplexVector& beta) {
  const RealMatrix j = symplectic_form(static_cast<int>(beta.size() / 2));
  const RealMatrix im = (beta * beta.adjoint()).imag();
  return -0.5 * j * im;
}

}  // namespace

cplx lambda_form(const ComplexVector& u, const ComplexVector& v, const ComplexVector& z) {
  check_same_length(u, v, "lambda_form");
  if (z.size() != u.size()) throw InvalidArgument("lambda_form: z has wrong length");
  return u.dot(z) + z.dot(v);
}

ComplexVector coupling_vector(const ComplexVector& u, const ComplexVector& v) {
  check_same_length(u, v, "coupling_vector");
  const auto n = u.size();
  ComplexVector beta(2 * n);
  beta.head(n) = u + v.conjugate();
  beta.tail(n) = -kI * (u - v.conjugate());
  return beta;
}

QuasifreePair pair_from_coupling(const ComplexVector& u, const ComplexVector& v) {
  const ComplexVector beta = coupling_vector(u, v);
  const RealMatrix c = (beta * beta.adjoint()).real();
  // D = beta beta^H >= 0 holds exactly; the tolerance only absorbs roundoff.
  return QuasifreePair(k_from_beta(beta), c);
}

ComplexVector LindbladTerm::u() const { return 0.5 * (b + kI * c); }
ComplexVector LindbladTerm::v() const { return (0.5 * (b - kI * c)).conjugate(); }

LindbladTerm LindbladTerm::from_coupling(const ComplexVector& u, const ComplexVector& v) {
  const ComplexVector beta = coupling_vector(u, v);
  const auto n = u.size();
  return {beta.head(n), beta.tail(n)};
}

DilationSpec decompose(const QuasifreePair& pair, double rank_tol) {
  if (!(rank_tol > 0.0)) throw InvalidArgument("decompose: rank_tol must be positive");
  const int n = pair.n();
  const RealMatrix& k = pair.K();
  const RealMatrix& c = pair.C();
  const RealMatrix j = symplectic_form(n);

  DilationSpec spec;
  spec.n = n;
  spec.source_k = k;
  spec.source_c = c;

  // Noise part from the spectral decomposition of D.
  const HermitianEigen d_eig = hermitian_eigen(noise_matrix(k, c));
  const double input_scale = std::max(max_abs(k), max_abs(c));
  const double d_cut = rank_tol * std::max(d_eig.values.size() ? d_eig.values(0) : 0.0, input_scale);
  RealMatrix k_noise = RealMatrix::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < d_eig.values.size(); ++i) {
    const double ev = d_eig.values(i);
    if (!(ev > d_cut)) break;  // sorted descending
    const ComplexVector beta = std::sqrt(ev) * fix_phase(d_eig.vectors.col(i));
    spec.lindblad.push_back({beta.head(n), beta.tail(n)});
    k_noise += k_from_beta(beta);
  }
  spec.k_prime = k - k_noise;

  // Hamiltonian part from the symmetric half of JK.
  const RealMatrix jk = j * k;
  const RealMatrix nmat = 0.5 * (jk + jk.transpose());
  const SymmetricEigen n_eig = symmetric_eigen(nmat);
  const double n_scale = std::max(n_eig.values.cwiseAbs().maxCoeff(), input_scale);
  for (Eigen::Index i = 0; i < n_eig.values.size(); ++i) {
    const double lam = n_eig.values(i);
    if (std::abs(lam) <= rank_tol * n_scale) continue;
    const RealVector zeta = n_eig.vectors.col(i);
    ComplexVector w(n);
    for (int q = 0; q < n; ++q) w(q) = cplx(zeta(q), zeta(n + q));
    spec.hamiltonian.push_back({lam, w});
  }
  return spec;
}

namespace {

RealMatrix n_from_terms(const std::vector<HamiltonianTerm>& terms, int n) {
  RealMatrix nmat = RealMatrix::Zero(2 * n, 2 * n);
  for (const auto& term : terms) {
    if (term.w.size() != n) throw InvalidArgument("Hamiltonian term has wrong length");
    const RealVector zeta = real_embed(term.w);
    nmat += term.lambda * zeta * zeta.transpose();
  }
  return nmat;
}

}  // namespace

DecompositionResiduals reconstruction_residuals(const DilationSpec& spec) {
  const int n = spec.n;
  const RealMatrix j = symplectic_form(n);
  RealMatrix k_sum = spec.k_prime;
  RealMatrix c_sum = RealMatrix::Zero(2 * n, 2 * n);
  for (const auto& term : spec.lindblad) {
    const QuasifreePair p = pair_from_coupling(term.u(), term.v());
    k_sum += p.K();
    c_sum += p.C();
  }
  DecompositionResiduals res;
  res.c_residual = max_abs(RealMatrix(c_sum - spec.source_c));
  res.k_residual = max_abs(RealMatrix(k_sum - spec.source_k));
  res.symplectic_defect =
      max_abs(RealMatrix(spec.k_prime.transpose() * j + j * spec.k_prime));
  res.hamiltonian_residual =
      max_abs(RealMatrix(n_from_terms(spec.hamiltonian, n) - j * spec.k_prime));
  return res;
}

GeneratorCoefficients hamiltonian_action(const std::vector<HamiltonianTerm>& terms,
                                         const RealMatrix& k_prime, const ComplexVector& z) {
  const auto n = z.size();
  if (k_prime.rows() != 2 * n || k_prime.cols() != 2 * n) {
    throw InvalidArgument("hamiltonian_action: K' has wrong shape");
  }
  // N = J K'  =>  K' = -J N.
  const RealMatrix j = symplectic_form(static_cast<int>(n));
  const RealMatrix k_terms = -j * n_from_terms(terms, static_cast<int>(n));
  if (max_abs(RealMatrix(k_terms - k_prime)) > 1e-8 * (1.0 + max_abs(k_prime))) {
    throw InvalidArgument("hamiltonian_action: Hamiltonian terms do not match K'");
  }
  const ComplexVector g = real_extract(k_terms * real_embed(z));
  return {g, 0.5 * (g.dot(z) - z.dot(g))};
}

QuasifreePair reconstruct_pair(const DilationSpec& spec) {
  RealMatrix k = spec.k_prime;
  RealMatrix c = RealMatrix::Zero(2 * spec.n, 2 * spec.n);
  for (const auto& term : spec.lindblad) {
    const QuasifreePair p = pair_from_coupling(term.u(), term.v());
    k += p.K();
    c += p.C();
  }
  return QuasifreePair(k, c);
}

DilationReport dilation_report(const DilationSpec& spec) {
  DilationReport rep;
  rep.n = spec.n;
  rep.noise_dimension = static_cast<int>(spec.lindblad.size());
  rep.hamiltonian_rank = static_cast<int>(spec.hamiltonian.size());
  rep.pure_hamiltonian = rep.noise_dimension == 0;
  rep.trivial = rep.noise_dimension == 0 && rep.hamiltonian_rank == 0;
  for (const auto& term : spec.lindblad) rep.couplings.emplace_back(term.u(), term.v());
  rep.hamiltonian = spec.hamiltonian;
  rep.k_prime = spec.k_prime;

  std::ostringstream os;
  os << "n = " << spec.n << ", noise dimension r = " << rep.noise_dimension
     << ", Hamiltonian rank r' = " << rep.hamiltonian_rank << ". ";
  if (rep.trivial) {
    os << "Trivial evolution: no noise and no Hamiltonian, U(t) = I.";
  } else if (rep.pure_hamiltonian) {
    os << "r = 0: the noisy Schroedinger equation reduces to the Schroedinger equation "
          "dU = -i H_dyn U dt with K' = K symplectic and C = 0.";
  } else {
    os << "dU = { sum_j (L_j dA_j^dag - L_j^dag dA_j) - (i H_dyn + 1/2 sum_j L_j^dag L_j) dt } U "
          "with L_j = a(u_j) + a^dag(v_j) on r = "
       << rep.noise_dimension << " noise channels.";
  }
  if (rep.hamiltonian_rank > 0) {
    os << " H = 1/4 sum_j lambda_j (a(w_j) + a^dag(w_j))^2 satisfies -i[H, W(z)] = K'-part of the "
          "generator, so the Schroedinger-picture Hamiltonian is H_dyn = -H.";
  }
  rep.summary = os.str();
  return rep;
}

}  // namespace qfl
