#include <doctest.h>

#include <stdexcept>

#include "cwchaos/poly_json.hpp"
#include "cwchaos/rational.hpp"
#include "oracles.hpp"

using namespace cwchaos;
using oracle::q;

TEST_CASE("parse and print rationals") {
  CHECK(parse_rational("6/4") == q(3, 2));
  CHECK(parse_rational("-7") == q(-7));
  CHECK(rational_to_string(q(6, 4)) == "3/2");
  CHECK(rational_to_string(q(3)) == "3/1");
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("x"), std::invalid_argument);
}

TEST_CASE("factorial and binomial") {
  CHECK(factorial(0) == 1);
  CHECK(factorial(6) == 720);
  CHECK(binomial(6, 2) == 15);
  CHECK(binomial(2, 5) == 0);
}

TEST_CASE("exact square roots") {
  Rational r;
  CHECK(exact_sqrt(q(9, 4), r));
  CHECK(r == q(3, 2));
  CHECK_FALSE(exact_sqrt(q(2), r));
  CHECK_FALSE(exact_sqrt(q(-4), r));
}

TEST_CASE("square root bounds bracket and shrink") {
  for (const Rational& x : {q(2), q(192), q(1, 3), q(0)}) {
    Rational lo, hi;
    sqrt_bounds(x, 64, lo, hi);
    CHECK(lo * lo <= x);
    CHECK(hi * hi >= x);
    CHECK(hi - lo <= Rational(1, 1) / Rational(mpz_class(1) << 64));
  }
  Rational lo, hi;
  CHECK_THROWS_AS(sqrt_bounds(q(-1), 8, lo, hi), std::domain_error);
}

TEST_CASE("complex rationals") {
  const RationalComplex a(q(1), q(2)), b(q(3), q(-1));
  CHECK(a * b == RationalComplex(q(5), q(5)));
  CHECK(a / a == RationalComplex(1));
  CHECK(a.conj() == RationalComplex(q(1), q(-2)));
  CHECK(a.norm() == 5);
  CHECK_THROWS_AS(RationalComplex().inverse(), std::domain_error);
}

TEST_CASE("hermitian matrices and json round trip") {
  RationalMatrix m(2);
  m(0, 0) = 2;
  m(0, 1) = RationalComplex(q(1), q(1));
  m(1, 0) = RationalComplex(q(1), q(-1));
  m(1, 1) = 3;
  CHECK(m.is_hermitian());
  CHECK(matrix_from_json(matrix_to_json(m)) == m);
  CHECK(matrix_from_json(nlohmann::json("2")) == RationalMatrix::scalar(1, q(2)));
  m(1, 0) = 1;
  CHECK_FALSE(m.is_hermitian());
}
