#include <doctest.h>

#include <cmath>

#include "cwchaos/wirtinger.hpp"

using namespace cwchaos;

namespace {

bool near(cplx a, cplx b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

}  // namespace

TEST_CASE("derivatives of z^2 zbar match the closed form") {
  const cplx z0(0.7, -1.3);
  const auto v = Jet2::seed(std::span<const cplx>(&z0, 1));
  const Jet2 f = v[0] * v[0] * v[0].conj();
  const cplx zb = std::conj(z0);
  CHECK(near(f.value(), z0 * z0 * zb));
  CHECK(near(f.dz(0), 2.0 * z0 * zb));
  CHECK(near(f.dzbar(0), z0 * z0));
  CHECK(near(f.dzz(0, 0), 2.0 * zb));
  CHECK(near(f.dzzb(0, 0), 2.0 * z0));
  CHECK(near(f.dzbz(0, 0), 2.0 * z0));
  CHECK(near(f.dzbzb(0, 0), 0.0));
}

TEST_CASE("conjugation swaps the holomorphic and antiholomorphic slots") {
  const std::vector<cplx> z{{0.3, 0.2}, {-1.0, 0.5}};
  const auto v = Jet2::seed(z);
  const Jet2 f = v[0] * v[1] * v[1];
  const Jet2 g = f.conj();
  CHECK(near(g.dzbar(1), std::conj(f.dz(1))));
  CHECK(near(g.dz(0), std::conj(f.dzbar(0))));
  CHECK(near(g.dzbzb(1, 1), std::conj(f.dzz(1, 1))));
}

TEST_CASE("chain rule agrees with finite differences") {
  const JetField field = [](std::span<const Jet2> v) {
    return exp(v[0] * v[1].conj()) + pow(v[0], 3) * v[1];
  };
  const std::vector<cplx> z{{0.4, -0.3}, {0.1, 0.6}};
  CHECK(check_against_finite_differences(field, z, 1e-5) < 1e-6);
}

TEST_CASE("|w|^2 outer derivatives") {
  const cplx w(1.5, -0.5);
  const auto d = outer_abs2(w);
  CHECK(near(d.value, std::norm(w)));
  CHECK(near(d.dw, std::conj(w)));
  CHECK(near(d.dwbar, w));
  CHECK(near(d.dwwbar, 1.0));
}

TEST_CASE("jet_arith rejects mismatched dimensions") {
  CHECK_THROWS_AS(jet_arith(Jet2(1, 1.0), Jet2(2, 1.0), JetOp::add), std::invalid_argument);
  const Jet2 a = Jet2::coordinate(1, 0, {2.0, 1.0});
  CHECK(near(jet_arith(a, a, JetOp::mul).dz(0), 2.0 * cplx(2.0, 1.0)));
  CHECK(near(jet_arith(a, a, JetOp::scale, {0.0, 1.0}).dz(0), cplx(0.0, 1.0)));
}
