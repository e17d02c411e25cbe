#include "cwchaos/poly_json.hpp"

#include <stdexcept>
#include <vector>

namespace cwchaos {

using nlohmann::json;

json rational_to_json(const Rational& r) { return rational_to_string(r); }

Rational rational_from_json(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(mpz_class(std::to_string(j.get<long long>())));
  throw std::invalid_argument("rational must be an \"a/b\" string or an integer");
}

json complex_to_json(const RationalComplex& c) {
  return {{"re", rational_to_json(c.re())}, {"im", rational_to_json(c.im())}};
}

RationalComplex complex_from_json(const json& j) {
  if (j.is_object()) {
    Rational re = j.contains("re") ? rational_from_json(j.at("re")) : Rational(0);
    Rational im = j.contains("im") ? rational_from_json(j.at("im")) : Rational(0);
    return {re, im};
  }
  return RationalComplex(rational_from_json(j));
}

json poly_to_json(const CWPoly& f) {
  json terms = json::array();
  const std::size_t n = f.num_vars();
  for (const auto& [m, c] : f.terms()) {
    std::vector<unsigned> p(n, 0), q(n, 0);
    for (const auto& fac : m.factors()) {
      p[fac.var] = fac.p;
      q[fac.var] = fac.q;
    }
    terms.push_back({{"p", p},
                     {"q", q},
                     {"re", rational_to_json(c.re())},
                     {"im", rational_to_json(c.im())}});
  }
  return {{"n", n}, {"terms", terms}};
}

CWPoly poly_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("terms"))
    throw std::invalid_argument("polynomial document needs \"n\" and \"terms\"");
  if (!j.at("n").is_number_unsigned() && !j.at("n").is_number_integer())
    throw std::invalid_argument("\"n\" must be a non-negative integer");
  const long long n_signed = j.at("n").get<long long>();
  if (n_signed < 0) throw std::invalid_argument("\"n\" must be non-negative");
  const auto n = static_cast<std::size_t>(n_signed);
  CWPoly f(n);
  for (const auto& t : j.at("terms")) {
    auto read_index = [&](const char* key) {
      std::vector<unsigned> idx;
      for (const auto& v : t.at(key)) {
        if (!v.is_number_integer() || v.get<long long>() < 0)
          throw std::invalid_argument("multi-index entries must be non-negative integers");
        idx.push_back(v.get<unsigned>());
      }
      if (idx.size() != n) throw std::invalid_argument("multi-index length must equal n");
      return idx;
    };
    const auto p = read_index("p");
    const auto q = read_index("q");
    Rational re = t.contains("re") ? rational_from_json(t.at("re")) : Rational(0);
    Rational im = t.contains("im") ? rational_from_json(t.at("im")) : Rational(0);
    f.add_term(Monomial(p, q), RationalComplex(re, im));
  }
  return f;
}

json matrix_to_json(const RationalMatrix& m) {
  json rows = json::array();
  for (std::size_t j = 0; j < m.dim(); ++j) {
    json row = json::array();
    for (std::size_t k = 0; k < m.dim(); ++k) {
      const auto& v = m(j, k);
      row.push_back(v.is_real() ? rational_to_json(v.re()) : complex_to_json(v));
    }
    rows.push_back(row);
  }
  return rows;
}

RationalMatrix matrix_from_json(const json& j) {
  if (!j.is_array()) {
    RationalMatrix m(1);
    m(0, 0) = complex_from_json(j);
    return m;
  }
  const std::size_t d = j.size();
  RationalMatrix m(d);
  for (std::size_t r = 0; r < d; ++r) {
    if (!j[r].is_array() || j[r].size() != d)
      throw std::invalid_argument("matrix must be square (array of equal-length rows)");
    for (std::size_t c = 0; c < d; ++c) m(r, c) = complex_from_json(j[r][c]);
  }
  return m;
}

nlohmann::json cplx_to_json(cplx c) { return {{"re", c.real()}, {"im", c.imag()}}; }

cplx cplx_from_json(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_object() || !j.contains("re") || !j.at("re").is_number())
    throw std::invalid_argument("complex value must be a number or {\"re\", \"im\"}");
  const double im = j.contains("im") ? j.at("im").get<double>() : 0.0;
  return {j.at("re").get<double>(), im};
}

nlohmann::json complex_vector_to_json(std::span<const cplx> v) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : v) out.push_back(cplx_to_json(c));
  return out;
}

}  // namespace cwchaos
