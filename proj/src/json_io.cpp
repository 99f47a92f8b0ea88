#include "qfl/json_io.hpp"

#include <fstream>
#include <sstream>

#include "qfl/error.hpp"

namespace qfl::json_io {

json to_json(cplx c) { return json::array({c.real(), c.imag()}); }

json to_json(const RealVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json to_json(const RealMatrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(RealVector(m.row(i).transpose())));
  return out;
}

json to_json(const ComplexVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

json to_json(const ComplexMatrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(ComplexVector(m.row(i).transpose())));
  return out;
}

json to_json(const GaussianState& s) {
  return {{"n", s.n()}, {"l", to_json(s.l())}, {"m", to_json(s.m())}, {"S", to_json(s.S())}};
}

json to_json(const QuasifreePair& p) {
  return {{"n", p.n()}, {"K", to_json(p.K())}, {"C", to_json(p.C())}};
}

json to_json(const DilationSpec& spec) {
  json lind = json::array();
  for (const auto& t : spec.lindblad) {
    lind.push_back({{"b", to_json(t.b)}, {"c", to_json(t.c)}, {"u", to_json(t.u())}, {"v", to_json(t.v())}});
  }
  json ham = json::array();
  for (const auto& t : spec.hamiltonian) ham.push_back({{"lambda", t.lambda}, {"w", to_json(t.w)}});
  return {{"n", spec.n}, {"lindblad", lind}, {"hamiltonian", ham}, {"Kprime", to_json(spec.k_prime)}};
}

json to_json(const KernelModel& model) {
  json group = json::array();
  for (const auto& perm : model.group) {
    json p = json::array();
    for (int image : perm) p.push_back(image + 1);
    group.push_back(p);
  }
  return {{"points", model.points}, {"K", to_json(model.K)}, {"group", group}};
}

json to_json(const FieldLaw& law) {
  return {{"mean", to_json(law.mean)}, {"covariance", to_json(law.covariance)}};
}

json to_json(const LevyLaw& law) {
  json atoms = json::array();
  for (const auto& a : law.atoms) atoms.push_back({{"x", a.x}, {"mass", a.mass}});
  return {{"atoms", atoms}};
}

const json& require(const json& j, const std::string& key) {
  if (!j.is_object()) throw MalformedInput("expected an object holding \"" + key + "\"");
  const auto it = j.find(key);
  if (it == j.end()) throw MalformedInput("missing field \"" + key + "\"");
  return *it;
}

namespace {

double number_from(const json& j) {
  if (!j.is_number()) throw MalformedInput("expected a number, got " + j.dump());
  return j.get<double>();
}

const json& array_from(const json& j) {
  if (!j.is_array()) throw MalformedInput("expected an array, got " + j.dump());
  return j;
}

template <typename Matrix, typename Reader>
Matrix matrix_from(const json& j, Reader read) {
  const json& rows = array_from(j);
  const auto r = static_cast<Eigen::Index>(rows.size());
  if (r == 0) return Matrix(0, 0);
  const auto c = static_cast<Eigen::Index>(array_from(rows[0]).size());
  Matrix out(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const json& row = array_from(rows[i]);
    if (static_cast<Eigen::Index>(row.size()) != c) throw MalformedInput("ragged matrix");
    for (Eigen::Index k = 0; k < c; ++k) out(i, k) = read(row[k]);
  }
  return out;
}

void check_n(const json& j, Eigen::Index n) {
  if (j.contains("n") && (!j["n"].is_number_integer() || j["n"].get<long>() != n)) {
    throw MalformedInput("field \"n\" does not match the data");
  }
}

}  // namespace

cplx complex_from(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {number_from(j[0]), number_from(j[1])};
  throw MalformedInput("expected a complex number [re, im], got " + j.dump());
}

RealVector real_vector_from(const json& j) {
  const json& a = array_from(j);
  RealVector out(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) out(static_cast<Eigen::Index>(i)) = number_from(a[i]);
  return out;
}

RealMatrix real_matrix_from(const json& j) { return matrix_from<RealMatrix>(j, number_from); }

ComplexVector complex_vector_from(const json& j) {
  const json& a = array_from(j);
  ComplexVector out(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) out(static_cast<Eigen::Index>(i)) = complex_from(a[i]);
  return out;
}

ComplexMatrix complex_matrix_from(const json& j) { return matrix_from<ComplexMatrix>(j, complex_from); }

GaussianState state_from(const json& j) {
  RealVector l = real_vector_from(require(j, "l"));
  check_n(j, l.size());
  return GaussianState(std::move(l), real_vector_from(require(j, "m")), real_matrix_from(require(j, "S")));
}

QuasifreePair pair_from(const json& j, double tol) {
  RealMatrix k = real_matrix_from(require(j, "K"));
  check_n(j, k.rows() / 2);
  return QuasifreePair(std::move(k), real_matrix_from(require(j, "C")), tol);
}

DilationSpec dilation_from(const json& j) {
  DilationSpec spec;
  spec.k_prime = real_matrix_from(require(j, "Kprime"));
  spec.n = static_cast<int>(spec.k_prime.rows() / 2);
  check_n(j, spec.n);
  for (const auto& t : array_from(require(j, "lindblad"))) {
    spec.lindblad.push_back({complex_vector_from(require(t, "b")), complex_vector_from(require(t, "c"))});
  }
  if (j.contains("hamiltonian")) {
    for (const auto& t : array_from(j["hamiltonian"])) {
      spec.hamiltonian.push_back({number_from(require(t, "lambda")), complex_vector_from(require(t, "w"))});
    }
  }
  const QuasifreePair pair = reconstruct_pair(spec);
  spec.source_k = pair.K();
  spec.source_c = pair.C();
  return spec;
}

KernelModel kernel_from(const json& j) {
  KernelModel model;
  model.K = complex_matrix_from(require(j, "K"));
  if (j.contains("points")) {
    for (const auto& p : array_from(j["points"])) model.points.push_back(p.is_string() ? p.get<std::string>() : p.dump());
  }
  if (j.contains("group")) {
    for (const auto& perm : array_from(j["group"])) {
      std::vector<int> images;
      for (const auto& x : array_from(perm)) {
        if (!x.is_number_integer()) throw MalformedInput("permutation entries must be integers");
        images.push_back(x.get<int>() - 1);
      }
      model.group.push_back(std::move(images));
    }
  }
  return model;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw MalformedInput(std::string("malformed JSON: ") + e.what());
  }
}

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace qfl::json_io
