#include <doctest.h>

#include <numbers>
#include <sstream>

#include "cwchaos/cgauss.hpp"
#include "cwchaos/fields.hpp"
#include "cwchaos/hermite.hpp"
#include "cwchaos/verify.hpp"
#include "oracles.hpp"

using namespace cwchaos;
using oracle::q;

namespace {

RationalMatrix sigma2() {
  RationalMatrix s(2);
  s(0, 0) = 2;
  s(0, 1) = RationalComplex(q(1, 2), q(1, 2));
  s(1, 0) = RationalComplex(q(1, 2), q(-1, 2));
  s(1, 1) = 1;
  return s;
}

}  // namespace

TEST_CASE("covariance validation") {
  ComplexMatrix bad(2, 2);
  bad << 1.0, 2.0, 0.0, 1.0;
  CHECK_THROWS_AS(GaussianSpec::centered(bad), std::invalid_argument);
  ComplexMatrix indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(GaussianSpec::centered(indefinite), std::invalid_argument);
  const GaussianSpec s = GaussianSpec::centered(to_eigen(sigma2()));
  CHECK((s.sqrt_factor() * s.sqrt_factor().adjoint() - s.sigma()).norm() < 1e-12);
  CHECK(s.determinant() == doctest::Approx(1.5));
}

TEST_CASE("density and characteristic function") {
  const GaussianSpec s = GaussianSpec::centered(to_eigen(sigma2()));
  const std::vector<cplx> zero{0.0, 0.0};
  CHECK(density(s, zero) == doctest::Approx(1.0 / (std::numbers::pi * std::numbers::pi * 1.5)));
  const std::vector<cplx> zeta{{0.3, -0.2}, {0.5, 0.1}};
  const SampleMatrix z = sample(s, 200000, 3);
  RunningStats re, im;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const cplx t = std::conj(z(i, 0)) * zeta[0] + std::conj(z(i, 1)) * zeta[1];
    const cplx e = std::exp(cplx(0.0, t.real()));
    re.add(e.real());
    im.add(e.imag());
  }
  const cplx cf = char_fn(s, zeta);
  CHECK(std::abs(re.mean() - cf.real()) < 4 * re.std_error());
  CHECK(std::abs(im.mean() - cf.imag()) < 4 * im.std_error() + 1e-3);
}

TEST_CASE("sampling is thread independent and CSV round trips") {
  const GaussianSpec s = GaussianSpec::centered(to_eigen(sigma2()));
  const SampleMatrix a = sample(s, 70000, 9, 1), b = sample(s, 70000, 9, 3);
  CHECK(a == b);
  std::stringstream io;
  write_samples_csv(io, a.topRows(50));
  const SampleMatrix back = read_samples_csv(io);
  CHECK(back == a.topRows(50));
  std::stringstream junk("re_1,im_1\n1,x\n");
  CHECK_THROWS_AS(read_samples_csv(junk), std::runtime_error);
}

TEST_CASE("sampler moments within 4 standard errors") {
  const GaussianSpec s = GaussianSpec::centered(to_eigen(sigma2()));
  for (const auto& m : sampler_moment_checks(s, 200000, 4)) {
    INFO(m.name);
    CHECK(m.within(4.0));
  }
  for (const auto& m : sampler_moment_checks(GaussianSpec::centered(ComplexMatrix::Constant(1, 1, 2.0)), 200000, 5)) {
    INFO(m.name);
    CHECK(m.within(4.0));
  }
}

TEST_CASE("integration by parts, exact and Monte Carlo") {
  const RationalMatrix sig = sigma2();
  const GaussianSpec s = GaussianSpec::centered(to_eigen(sig));
  const CWPoly z0 = CWPoly::z(2, 0), z1b = CWPoly::zbar(2, 1);
  const FieldPtr phi = make_poly_field(z0 * z1b * z1b + z0 * z0 * CWPoly::zbar(2, 0));
  for (std::size_t i = 0; i < 2; ++i)
    for (const auto& id : verify_ibp(s, phi, i, 100000, 6, 0, &sig)) {
      INFO(id.name);
      CHECK(id.exact_agrees());
      CHECK(id.within(4.0));
    }
}

TEST_CASE("one-dimensional characterization E[df/dz] = E[conj(Z) f]") {
  const CWPoly z = CWPoly::z(1, 0), zb = CWPoly::zbar(1, 0);
  const auto id = verify_lemma1(make_poly_field(z * z * zb + zb * zb), 100000, 7);
  CHECK(id.exact_agrees());
  CHECK(id.within(4.0));
  const auto bump = verify_lemma1(make_gaussian_bump_field(1), 100000, 8);
  CHECK(bump.within(4.0));
}

TEST_CASE("Stein operator has mean zero exactly") {
  Engine e = make_engine(61, 0);
  const RationalMatrix sig = sigma2();
  for (int t = 0; t < 40; ++t) {
    const CWPoly f = random_poly(e, {2, 4, 4, 3});
    const CWPoly sf = stein_operator(f, sig);
    CHECK(gaussian_expectation(sf, sig).is_zero());
    CHECK(oracle::wick_by_pairings(sf, sig).is_zero());
  }
}

TEST_CASE("Stein operator vanishing in mean fails for a wrong law") {
  // Under CN(0, 2) the operator built for sigma = 1 does not have mean zero on |z|^2.
  const CWPoly f = CWPoly::z(1, 0) * CWPoly::zbar(1, 0);
  const CWPoly sf = stein_operator(f, RationalMatrix::identity(1));
  CHECK_FALSE(gaussian_expectation(sf, RationalMatrix::scalar(1, q(2))).is_zero());
}
