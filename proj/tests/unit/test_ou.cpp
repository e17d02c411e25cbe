#include <doctest.h>

#include "cwchaos/hermite.hpp"
#include "cwchaos/ou.hpp"
#include "cwchaos/verify.hpp"
#include "oracles.hpp"

using namespace cwchaos;
using oracle::q;

TEST_CASE("both L routes agree on random polynomials") {
  Engine e = make_engine(31, 0);
  for (int t = 0; t < 100; ++t) {
    const CWPoly f = random_poly(e, {1 + std::size_t(t % 3), 5, 5, 3});
    CHECK(ou::apply_L(f, ou::LRoute::hermite) == ou::apply_L(f, ou::LRoute::differential));
  }
}

TEST_CASE("L is self-adjoint and commutes with conjugation") {
  Engine e = make_engine(32, 0);
  for (int t = 0; t < 50; ++t) {
    const CWPoly f = random_poly(e, {2, 4, 4, 3}), g = random_poly(e, {2, 4, 4, 3});
    CHECK(inner_product(ou::apply_L(f), g) == inner_product(f, ou::apply_L(g)));
    CHECK(ou::apply_L(f).conj() == ou::apply_L(f.conj()));
    CHECK(sgn(inner_product(ou::apply_L(f), f).re()) <= 0);
  }
}

TEST_CASE("eigen-relation up to degree 6") {
  const SuiteResult r = l_eigen_suite(6, 2);
  CHECK(r.failed == 0);
  CHECK(r.passed > 0);
}

TEST_CASE("carre du champ: closed form equals the defining identity") {
  const SuiteResult r = gamma_routes_suite(33, 100);
  CHECK(r.failed == 0);
}

TEST_CASE("carre du champ is Hermitian and positive") {
  Engine e = make_engine(34, 0);
  for (int t = 0; t < 50; ++t) {
    const CWPoly f = random_poly(e, {2, 3, 4, 3}), g = random_poly(e, {2, 3, 4, 3});
    CHECK(ou::gamma(f, g) == ou::gamma(g, f).conj());
    CHECK(ou::gamma(f.conj(), g.conj()) == ou::gamma(f, g).conj());
    CHECK(sgn(gaussian_expectation(ou::gamma(f, f)).re()) >= 0);
  }
}

TEST_CASE("Gamma of coordinates") {
  const CWPoly z = CWPoly::z(1, 0), zb = CWPoly::zbar(1, 0);
  CHECK(ou::gamma(z, z) == CWPoly::constant(1, 1));
  CHECK(ou::gamma(z, zb).is_zero());
  // Gamma(z^2, z^2 / 2) = 2 |z|^2
  CHECK(ou::gamma(z * z, z * z * RationalComplex(q(1, 2))) == z * zb * RationalComplex(2));
}

TEST_CASE("integration by parts, diffusion property and chain rule") {
  CHECK(integration_by_parts_suite(35, 100).failed == 0);
  CHECK(diffusion_suite(36, 15).failed == 0);
  CHECK(chain_rule_suite(37, 15).failed == 0);
}

TEST_CASE("pseudo-inverse") {
  Engine e = make_engine(38, 0);
  for (int t = 0; t < 40; ++t) {
    CWPoly f = random_poly(e, {2, 4, 4, 3});
    f -= CWPoly::constant(2, gaussian_expectation(f));
    CHECK(ou::apply_L(ou::apply_L_inverse(f)) == f);
  }
  CHECK_THROWS_AS(ou::apply_L_inverse(CWPoly::constant(1, 1)), std::invalid_argument);
}

TEST_CASE("projections decompose a polynomial") {
  Engine e = make_engine(39, 0);
  for (int t = 0; t < 30; ++t) {
    const CWPoly f = random_poly(e, {2, 4, 4, 3});
    CWPoly sum(2);
    for (unsigned k = 0; k <= 4; ++k) {
      const CWPoly p = ou::project(f, k);
      CHECK(ou::apply_L(p) == p * RationalComplex(-static_cast<long>(k)));
      sum += p;
    }
    CHECK(sum == f);
  }
}

TEST_CASE("eigenfunction validation") {
  const CWPoly z = CWPoly::z(1, 0), zb = CWPoly::zbar(1, 0);
  CHECK_NOTHROW(Eigenfunction(hermite::hermite_poly(2, 1), 3));
  CHECK_THROWS_AS(Eigenfunction(z * zb, 2), std::invalid_argument);
  CHECK(Eigenfunction::from_poly(z * z).eigenvalue() == 2);
  CHECK_THROWS_AS(Eigenfunction::from_poly(CWPoly(1)), std::invalid_argument);
}

TEST_CASE("composition substitutes z and zbar") {
  const CWPoly z = CWPoly::z(1, 0), zb = CWPoly::zbar(1, 0);
  const CWPoly phi = CWPoly::z(1, 0) * CWPoly::zbar(1, 0);
  const std::vector<CWPoly> F{z * z};
  CHECK(ou::compose(phi, F) == z * z * zb * zb);
}

TEST_CASE("spectral inequality on random chaos elements") {
  CHECK(thm3_suite(40, 100).failed == 0);
}

TEST_CASE("spectral inequality example: F = H_{1,1} + z, eta = 2") {
  const CWPoly f = hermite::hermite_poly(1, 1) + CWPoly::z(1, 0);
  const auto r = ou::check_thm3(f, q(2));
  // (L + 2) conj F = conj z, so int F (L+2) conj F = 1 and int F (L+2)^2 conj F = 1.
  CHECK(r.first == 1);
  CHECK(r.lhs == 1);
  CHECK(r.mid == 2);
  CHECK(r.c == 1);
  CHECK(r.holds);
  CHECK_THROWS_AS(ou::check_thm3(f, q(1)), std::invalid_argument);
}

TEST_CASE("Gamma moment inequality on random eigenfunction pairs") {
  CHECK(cor1_suite(41, 100).failed == 0);
}

TEST_CASE("Gamma moment inequality example: F1 = F2 = z^2") {
  const Eigenfunction f(CWPoly::z(1, 0) * CWPoly::z(1, 0), 2);
  const auto r = ou::check_cor1(f, f);
  // Gamma(z^2, z^2) = 4|z|^2: lhs = 16 E|z|^4 = 32, rhs = 2 E[|z|^4 4|z|^2] = 48.
  CHECK(r.lhs == 32);
  CHECK(r.rhs == 48);
  CHECK(r.holds);
}

TEST_CASE("joint chaoticity of OU eigenfunctions") {
  Engine e = make_engine(42, 0);
  for (int t = 0; t < 20; ++t) {
    const Eigenfunction a = random_eigenfunction(e, 2, 1 + t % 3), b = random_eigenfunction(e, 2, 2);
    CHECK(ou::is_jointly_chaotic(a, b));
  }
}
