#pragma once

#include <string>

#include <json.hpp>

#include "qfl/dilation.hpp"
#include "qfl/fields.hpp"
#include "qfl/gaussian_state.hpp"
#include "qfl/quasifree.hpp"

namespace qfl::json_io {

using nlohmann::json;

// Complex numbers are written as [re, im]; readers also accept a bare real.
json to_json(cplx c);
json to_json(const RealVector& v);
json to_json(const RealMatrix& m);
json to_json(const ComplexVector& v);
json to_json(const ComplexMatrix& m);
json to_json(const GaussianState& s);
json to_json(const QuasifreePair& p);
json to_json(const DilationSpec& spec);
json to_json(const KernelModel& model);
json to_json(const FieldLaw& law);
json to_json(const LevyLaw& law);

// Readers throw MalformedInput on missing fields, wrong types or ragged arrays.
cplx complex_from(const json& j);
RealVector real_vector_from(const json& j);
RealMatrix real_matrix_from(const json& j);
ComplexVector complex_vector_from(const json& j);
ComplexMatrix complex_matrix_from(const json& j);
GaussianState state_from(const json& j);
QuasifreePair pair_from(const json& j, double tol = kDefaultPsdTol);
DilationSpec dilation_from(const json& j);
/// Permutations in "group" are 1-based in the document.
KernelModel kernel_from(const json& j);

const json& require(const json& j, const std::string& key);
json parse(const std::string& text);
json read_file(const std::string& path);

}  // namespace qfl::json_io
