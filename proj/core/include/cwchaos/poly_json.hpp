#pragma once

// Polynomial interchange format:
//   {"n": 2, "terms": [{"p": [2, 0], "q": [0, 0], "re": "1/1", "im": "0/1"}, ...]}
// Rationals are "a/b" strings in lowest terms; readers also accept "a" and
// JSON integers. Terms are written in canonical monomial order.

#include <span>

#include <nlohmann/json.hpp>

#include "cwchaos/cpoly.hpp"
#include "cwchaos/rational.hpp"

namespace cwchaos {

nlohmann::json poly_to_json(const CWPoly& f);
// Throws std::invalid_argument on schema violations.
CWPoly poly_from_json(const nlohmann::json& j);

nlohmann::json rational_to_json(const Rational& r);
Rational rational_from_json(const nlohmann::json& j);

// Entries are either a rational (string or integer) or {"re": ..., "im": ...}.
nlohmann::json complex_to_json(const RationalComplex& c);
RationalComplex complex_from_json(const nlohmann::json& j);

// A d x d matrix as an array of rows; a bare scalar is read as a 1 x 1 matrix.
nlohmann::json matrix_to_json(const RationalMatrix& m);
RationalMatrix matrix_from_json(const nlohmann::json& j);

// Floating-point values as {"re": x, "im": y}.
nlohmann::json cplx_to_json(cplx c);
cplx cplx_from_json(const nlohmann::json& j);
nlohmann::json complex_vector_to_json(std::span<const cplx> v);

}  // namespace cwchaos
