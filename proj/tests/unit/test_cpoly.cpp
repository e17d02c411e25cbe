#include <doctest.h>

#include "cwchaos/cpoly.hpp"
#include "cwchaos/poly_json.hpp"
#include "cwchaos/verify.hpp"
#include "oracles.hpp"

using namespace cwchaos;
using oracle::q;

namespace {

RationalMatrix random_hermitian_pd(Engine& e, std::size_t d) {
  // A A* + I with small rational A.
  std::vector<RationalComplex> a(d * d);
  for (auto& x : a) x = random_coefficient(e, 2);
  RationalMatrix m(d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < d; ++k) {
      RationalComplex s = j == k ? RationalComplex(1) : RationalComplex();
      for (std::size_t l = 0; l < d; ++l) s += a[j * d + l] * a[k * d + l].conj();
      m(j, k) = s;
    }
  return m;
}

}  // namespace

TEST_CASE("monomial bookkeeping") {
  const std::vector<unsigned> p{2, 0, 1}, qq{1, 0, 1};
  const Monomial m(p, qq);
  CHECK(m.total_degree() == 5);
  CHECK(m.span() == 3);
  CHECK_FALSE(m.is_balanced());
  CHECK(m.conj().p(0) == 1);
  CHECK((m * m.conj()).is_balanced());
}

TEST_CASE("standard Gaussian moments: E|Z|^{2p} = p!") {
  const CWPoly z = CWPoly::z(1, 0), zb = CWPoly::zbar(1, 0);
  CWPoly power = CWPoly::constant(1, 1);
  for (unsigned p = 1; p <= 6; ++p) {
    power = power * z * zb;
    CHECK(gaussian_expectation(power) == factorial(p));
  }
  CHECK(gaussian_expectation(z * z * zb).is_zero());
}

TEST_CASE("one-dimensional moment formula under variance s: p! s^p") {
  const CWPoly abs2 = CWPoly::z(1, 0) * CWPoly::zbar(1, 0);
  const Rational s = q(3, 2);
  CWPoly power = CWPoly::constant(1, 1);
  Rational sp = 1;
  for (unsigned p = 1; p <= 5; ++p) {
    power = power * abs2;
    sp *= s;
    CHECK(gaussian_expectation(power, RationalMatrix::scalar(1, s)) == RationalComplex(Rational(factorial(p) * sp)));
  }
}

TEST_CASE("Wick expectation agrees with the pairing oracle") {
  Engine e = make_engine(11, 0);
  for (int t = 0; t < 60; ++t) {
    const std::size_t d = 1 + t % 3;
    const RationalMatrix sigma = random_hermitian_pd(e, d);
    const CWPoly f = random_poly(e, {d, 4, 5, 3});
    CHECK(gaussian_expectation(f, sigma) == oracle::wick_by_pairings(f, sigma));
    const auto numeric = gaussian_expectation(f, sigma.to_complex());
    CHECK(std::abs(numeric - gaussian_expectation(f, sigma).to_complex()) < 1e-9);
  }
}

TEST_CASE("identity covariance reduces to the standard expectation") {
  Engine e = make_engine(12, 0);
  for (int t = 0; t < 40; ++t) {
    const CWPoly f = random_poly(e, {2, 4, 5, 3});
    CHECK(gaussian_expectation(f, RationalMatrix::identity(2)) == gaussian_expectation(f));
  }
}

TEST_CASE("inner product and product expectation") {
  Engine e = make_engine(13, 0);
  for (int t = 0; t < 40; ++t) {
    const CWPoly f = random_poly(e, {2, 3, 4, 3}), g = random_poly(e, {2, 3, 4, 3});
    CHECK(inner_product(f, g) == gaussian_expectation(f * g.conj()));
    CHECK(expectation_of_product(f, g) == gaussian_expectation(f * g));
    CHECK(inner_product(f, f).is_real());
  }
}

TEST_CASE("formal Wirtinger derivatives") {
  const CWPoly z = CWPoly::z(2, 0), w = CWPoly::zbar(2, 1);
  const CWPoly f = z * z * w + w;
  CHECK(wirtinger_diff(f, 0, false) == z * w * RationalComplex(2));
  CHECK(wirtinger_diff(f, 1, true) == z * z + CWPoly::constant(2, 1));
  CHECK(wirtinger_diff(f, 0, true).is_zero());
}

TEST_CASE("numeric evaluation: exact, compiled and jet forms agree") {
  Engine e = make_engine(14, 0);
  const std::vector<cplx> pt{{0.3, -0.7}, {1.1, 0.4}};
  const auto jets = Jet2::seed(pt);
  for (int t = 0; t < 20; ++t) {
    const CWPoly f = random_poly(e, {2, 4, 5, 3});
    const cplx v = evaluate(f, pt);
    CHECK(std::abs(CompiledPoly(f)(pt) - v) < 1e-12);
    const Jet2 j = evaluate(f, jets);
    CHECK(std::abs(j.value() - v) < 1e-12);
    CHECK(std::abs(j.dzbar(1) - evaluate(wirtinger_diff(f, 1, true), pt)) < 1e-11);
  }
}

TEST_CASE("polynomial json round trip and schema errors") {
  Engine e = make_engine(15, 0);
  for (int t = 0; t < 20; ++t) {
    const CWPoly f = random_poly(e, {3, 3, 4, 3});
    CHECK(poly_from_json(poly_to_json(f)) == f);
  }
  CHECK_THROWS_AS(poly_from_json(nlohmann::json::parse(R"({"n": 1, "terms": [{"p": [1, 0], "q": [0]}]})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(poly_arith(CWPoly(1), CWPoly(2), PolyOp::add), std::invalid_argument);
}
