#include "cwchaos/ou.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>

namespace cwchaos {

Eigenfunction::Eigenfunction(CWPoly poly, unsigned eigenvalue)
    : poly_(std::move(poly)), eigenvalue_(eigenvalue) {
  const auto support = hermite::to_hermite(poly_).eigenvalue_support();
  if (!support.empty() && (support.size() != 1 || *support.begin() != eigenvalue_))
    throw std::invalid_argument("polynomial is not an eigenfunction with eigenvalue " +
                                std::to_string(eigenvalue_));
}

Eigenfunction Eigenfunction::from_poly(CWPoly poly) {
  const auto support = hermite::to_hermite(poly).eigenvalue_support();
  if (support.size() != 1)
    throw std::invalid_argument("polynomial is zero or spans several eigenspaces");
  Eigenfunction e;
  e.eigenvalue_ = *support.begin();
  e.poly_ = std::move(poly);
  return e;
}

std::size_t ChaoticVector::num_vars() const {
  return components.empty() ? 0 : components.front().num_vars();
}

void ChaoticVector::validate_centered() const {
  if (components.empty()) throw std::invalid_argument("chaotic vector has no components");
  if (sgn(scale_sq) <= 0) throw std::invalid_argument("scale_sq must be positive");
  const std::size_t n = num_vars();
  for (const auto& c : components) {
    if (c.num_vars() != n) throw std::invalid_argument("components differ in variable count");
    if (!gaussian_expectation(c.poly()).is_zero())
      throw std::invalid_argument("component is not centered");
  }
}

namespace ou {

namespace {

void require_same_n(const CWPoly& a, const CWPoly& b) {
  if (a.num_vars() != b.num_vars()) throw std::invalid_argument("variable count mismatch");
}

CWPoly apply_L_differential(const CWPoly& f) {
  CWPoly out(f.num_vars());
  for (const auto& [mono, c] : f.terms()) {
    const unsigned deg = mono.total_degree();
    if (deg == 0) continue;
    out.add_term(mono, c * RationalComplex(-static_cast<long>(deg)));
    // 2 d_z d_zbar acting on each coordinate separately.
    const auto& factors = mono.factors();
    for (std::size_t i = 0; i < factors.size(); ++i) {
      const Factor& fac = factors[i];
      if (fac.p == 0 || fac.q == 0) continue;
      auto lowered = factors;
      lowered[i].p -= 1;
      lowered[i].q -= 1;
      if (lowered[i].p + lowered[i].q == 0) lowered.erase(lowered.begin() + static_cast<long>(i));
      out.add_term(Monomial::from_factors(std::move(lowered)),
                   c * RationalComplex(static_cast<long>(2 * fac.p * fac.q)));
    }
  }
  return out;
}

CWPoly apply_L_hermite(const CWPoly& f) {
  const HermiteExpansion e = hermite::to_hermite(f);
  HermiteExpansion scaled(e.num_vars());
  for (const auto& [idx, c] : e.coefficients())
    scaled.add(idx, c * RationalComplex(-static_cast<long>(idx.total_degree())));
  return hermite::from_hermite(scaled);
}

Rational real_part_checked(const RationalComplex& v, const char* what) {
  if (!v.is_real()) throw std::logic_error(std::string(what) + " is not real");
  return v.re();
}

}  // namespace

CWPoly apply_L(const CWPoly& f, LRoute route) {
  return route == LRoute::hermite ? apply_L_hermite(f) : apply_L_differential(f);
}

CWPoly gamma(const CWPoly& f, const CWPoly& g, GammaRoute route) {
  require_same_n(f, g);
  if (route == GammaRoute::defining) {
    const CWPoly gb = g.conj();
    CWPoly out = apply_L(f * gb) - f * apply_L(gb) - gb * apply_L(f);
    return out.scaled(RationalComplex(Rational(1, 2)));
  }
  CWPoly out(f.num_vars());
  for (std::size_t j = 0; j < f.num_vars(); ++j) {
    for (bool bar : {false, true}) {
      const CWPoly df = wirtinger_diff(f, j, bar);
      if (df.is_zero()) continue;
      const CWPoly dg = wirtinger_diff(g, j, bar);
      if (dg.is_zero()) continue;
      out += df * dg.conj();
    }
  }
  return out;
}

CWPoly apply_L_inverse(const CWPoly& f) {
  if (!gaussian_expectation(f).is_zero())
    throw std::invalid_argument("L^-1 requires a centered polynomial");
  const HermiteExpansion e = hermite::to_hermite(f);
  HermiteExpansion out(e.num_vars());
  for (const auto& [idx, c] : e.coefficients())
    out.add(idx, c / RationalComplex(-static_cast<long>(idx.total_degree())));
  return hermite::from_hermite(out);
}

CWPoly project(const CWPoly& f, unsigned lambda) {
  const HermiteExpansion e = hermite::to_hermite(f);
  HermiteExpansion out(e.num_vars());
  for (const auto& [idx, c] : e.coefficients())
    if (idx.total_degree() == lambda) out.add(idx, c);
  return hermite::from_hermite(out);
}

bool is_jointly_chaotic(const Eigenfunction& f1, const Eigenfunction& f2) {
  require_same_n(f1.poly(), f2.poly());
  const unsigned bound = f1.eigenvalue() + f2.eigenvalue();
  for (const CWPoly& prod : {f1.poly() * f2.poly(), f1.poly() * f2.poly().conj()}) {
    if (prod.is_zero()) continue;
    if (hermite::to_hermite(prod).max_eigenvalue() > bound) return false;
  }
  return true;
}

bool is_chaotic(const ChaoticVector& v) {
  for (std::size_t j = 0; j < v.dim(); ++j)
    for (std::size_t k = j; k < v.dim(); ++k)
      if (!is_jointly_chaotic(v.components[j], v.components[k])) return false;
  return true;
}

CWPoly compose(const CWPoly& phi, const std::vector<CWPoly>& F) {
  if (phi.num_vars() != F.size()) throw std::invalid_argument("phi arity differs from |F|");
  if (F.empty()) return phi;
  const std::size_t n = F.front().num_vars();
  for (const auto& c : F)
    if (c.num_vars() != n) throw std::invalid_argument("components differ in variable count");

  std::map<std::pair<std::size_t, unsigned>, CWPoly> pow_z, pow_zb;
  auto power = [&](std::map<std::pair<std::size_t, unsigned>, CWPoly>& cache, std::size_t j,
                   unsigned k, bool bar) -> const CWPoly& {
    auto it = cache.find({j, k});
    if (it != cache.end()) return it->second;
    CWPoly r = CWPoly::constant(n, 1);
    const CWPoly base = bar ? F[j].conj() : F[j];
    for (unsigned i = 0; i < k; ++i) r = r * base;
    return cache.emplace(std::make_pair(j, k), std::move(r)).first->second;
  };

  CWPoly out(n);
  for (const auto& [mono, c] : phi.terms()) {
    CWPoly term = CWPoly::constant(n, c);
    for (const auto& fac : mono.factors()) {
      if (fac.p > 0) term = term * power(pow_z, fac.var, fac.p, false);
      if (fac.q > 0) term = term * power(pow_zb, fac.var, fac.q, true);
    }
    out += term;
  }
  return out;
}

Thm3Result check_thm3(const CWPoly& f, const Rational& eta) {
  const unsigned lambda_p = f.is_zero() ? 0 : hermite::to_hermite(f).max_eigenvalue();
  if (eta < lambda_p) throw std::invalid_argument("eta must be at least the top eigenvalue");

  const CWPoly fb = f.conj();
  const CWPoly shifted = apply_L(fb) + fb.scaled(RationalComplex(eta));
  const CWPoly shifted2 = apply_L(shifted) + shifted.scaled(RationalComplex(eta));

  Thm3Result r;
  r.first = real_part_checked(expectation_of_product(f, shifted), "int F (L+eta) Fbar");
  r.lhs = real_part_checked(expectation_of_product(f, shifted2), "int F (L+eta)^2 Fbar");
  r.mid = eta * r.first;

  bool have_min = false;
  Rational min_gap;
  for (unsigned k = 0; k <= lambda_p; ++k) {
    Rational gap = eta - k;
    if (sgn(gap) == 0) continue;
    if (!have_min || gap < min_gap) {
      min_gap = gap;
      have_min = true;
    }
  }
  r.c = have_min ? Rational(1 / min_gap) : Rational(0);
  r.rhs = r.c * r.lhs;
  r.holds = r.lhs <= r.mid && r.first <= r.rhs;
  return r;
}

Cor1Result check_cor1(const Eigenfunction& f1, const Eigenfunction& f2) {
  if (!is_jointly_chaotic(f1, f2)) throw std::invalid_argument("pair is not jointly chaotic");
  const CWPoly g = gamma(f1.poly(), f2.poly());

  Cor1Result r;
  r.lhs = real_part_checked(inner_product(g, g), "int |Gamma|^2");
  const RationalComplex weighted =
      expectation_of_product(f1.poly().conj() * f2.poly(), g) *
      RationalComplex(Rational(f1.eigenvalue() + f2.eigenvalue()) / 2);
  r.rhs_real = weighted.is_real();
  r.rhs = weighted.re();
  r.holds = r.rhs_real && sgn(r.rhs) >= 0 && r.lhs <= r.rhs;
  return r;
}

}  // namespace ou

}  // namespace cwchaos
