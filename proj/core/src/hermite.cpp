#include "cwchaos/hermite.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace cwchaos {

cplx ScaledPoly::evaluate(std::span<const cplx> point) const {
  return cwchaos::evaluate(poly, point) * scale();
}

namespace hermite {

namespace {

// Terms of H_{p,q} as (power of z, power of zbar, coefficient).
struct HermiteTerm {
  unsigned zp;
  unsigned zq;
  Rational coeff;
};

const std::vector<HermiteTerm>& hermite_terms(unsigned p, unsigned q) {
  thread_local std::map<std::pair<unsigned, unsigned>, std::vector<HermiteTerm>> cache;
  auto [it, inserted] = cache.try_emplace({p, q});
  if (inserted) {
    const unsigned m = std::min(p, q);
    for (unsigned j = 0; j <= m; ++j) {
      Rational c = binomial(p, j) * binomial(q, j) * factorial(j);
      if (j % 2 == 1) c = -c;
      it->second.push_back({p - j, q - j, c});
    }
  }
  return it->second;
}

// One-dimensional expansion z^p zbar^q = sum c_{a,b} H_{a,b}, with
// c_{a,b} = E[z^p zbar^q conj(H_{a,b})] / (a! b!).
struct OneDimCoeff {
  unsigned a;
  unsigned b;
  Rational coeff;
};

const std::vector<OneDimCoeff>& monomial_expansion(unsigned p, unsigned q) {
  thread_local std::map<std::pair<unsigned, unsigned>, std::vector<OneDimCoeff>> cache;
  auto [it, inserted] = cache.try_emplace({p, q});
  if (inserted) {
    const CWPoly mono = CWPoly::monomial(1, Monomial::single(0, p, q));
    // Only H_{a,b} with a - b = p - q and a <= p can have a nonzero inner product.
    for (unsigned a = 0; a <= p; ++a) {
      if (static_cast<long>(a) + static_cast<long>(q) < static_cast<long>(p)) continue;
      const unsigned b = a + q - p;
      if (b > q) continue;
      const RationalComplex ip = inner_product(mono, hermite_poly(static_cast<int>(a), static_cast<int>(b)));
      if (ip.is_zero()) continue;
      it->second.push_back({a, b, ip.re() / (factorial(a) * factorial(b))});
    }
  }
  return it->second;
}

}  // namespace

CWPoly hermite_poly(int p, int q) {
  if (p < 0 || q < 0) throw std::invalid_argument("Hermite indices must be non-negative");
  return hermite_poly_in(1, 0, static_cast<unsigned>(p), static_cast<unsigned>(q));
}

CWPoly hermite_poly_in(std::size_t n, std::size_t var, unsigned p, unsigned q) {
  if (var >= n) throw std::out_of_range("variable index out of range");
  CWPoly out(n);
  for (const auto& t : hermite_terms(p, q))
    out.add_term(Monomial::single(static_cast<std::uint32_t>(var), t.zp, t.zq),
                 RationalComplex(t.coeff));
  return out;
}

CWPoly product_element(std::size_t n, const PhiIndex& index) {
  if (index.span() > n) throw std::out_of_range("index uses a variable beyond n");
  CWPoly out = CWPoly::constant(n, 1);
  for (const auto& f : index.factors()) out = out * hermite_poly_in(n, f.var, f.p, f.q);
  return out;
}

CWPoly product_element(std::span<const unsigned> m_p, std::span<const unsigned> m_q) {
  if (m_p.size() != m_q.size()) throw std::invalid_argument("multi-index length mismatch");
  return product_element(m_p.size(), PhiIndex(m_p, m_q));
}

Rational norm_sq(const PhiIndex& index) {
  Rational r(1);
  for (const auto& f : index.factors()) r *= factorial(f.p) * factorial(f.q);
  return r;
}

ScaledPoly phi_basis_element(std::span<const unsigned> m_p, std::span<const unsigned> m_q) {
  if (m_p.size() != m_q.size()) throw std::invalid_argument("multi-index length mismatch");
  const PhiIndex idx(m_p, m_q);
  Rational inv = 1 / norm_sq(idx);
  return {product_element(m_p.size(), idx), inv};
}

}  // namespace hermite

RationalComplex HermiteExpansion::coefficient(const PhiIndex& idx) const {
  auto it = coeffs_.find(idx);
  return it == coeffs_.end() ? RationalComplex() : it->second;
}

cplx HermiteExpansion::phi_coefficient(const PhiIndex& idx) const {
  return coefficient(idx).to_complex() * std::sqrt(hermite::norm_sq(idx).get_d());
}

void HermiteExpansion::add(const PhiIndex& idx, const RationalComplex& c) {
  if (c.is_zero()) return;
  if (idx.span() > n_) throw std::out_of_range("index uses a variable beyond n");
  auto [it, inserted] = coeffs_.try_emplace(idx, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) coeffs_.erase(it);
  }
}

std::set<unsigned> HermiteExpansion::eigenvalue_support() const {
  std::set<unsigned> out;
  for (const auto& [idx, c] : coeffs_) out.insert(idx.total_degree());
  return out;
}

unsigned HermiteExpansion::max_eigenvalue() const {
  unsigned m = 0;
  for (const auto& [idx, c] : coeffs_) m = std::max(m, idx.total_degree());
  return m;
}

namespace hermite {

HermiteExpansion to_hermite(const CWPoly& f) {
  HermiteExpansion out(f.num_vars());
  for (const auto& [mono, c] : f.terms()) {
    // Cartesian product of the per-coordinate expansions.
    std::vector<std::pair<std::vector<Factor>, Rational>> partial{{{}, Rational(1)}};
    for (const auto& fac : mono.factors()) {
      const auto& one_dim = monomial_expansion(fac.p, fac.q);
      std::vector<std::pair<std::vector<Factor>, Rational>> next;
      next.reserve(partial.size() * one_dim.size());
      for (const auto& [factors, coeff] : partial) {
        for (const auto& e : one_dim) {
          auto extended = factors;
          if (e.a + e.b > 0) extended.push_back({fac.var, e.a, e.b});
          next.emplace_back(std::move(extended), coeff * e.coeff);
        }
      }
      partial = std::move(next);
    }
    for (auto& [factors, coeff] : partial)
      out.add(PhiIndex::from_factors(std::move(factors)), c * RationalComplex(coeff));
  }
  return out;
}

CWPoly from_hermite(const HermiteExpansion& e) {
  CWPoly out(e.num_vars());
  for (const auto& [idx, c] : e.coefficients()) out += product_element(e.num_vars(), idx) * c;
  return out;
}

}  // namespace hermite

}  // namespace cwchaos
