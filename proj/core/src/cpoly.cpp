#include "cwchaos/cpoly.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace cwchaos {

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(std::span<const unsigned> p, std::span<const unsigned> q) {
  if (p.size() != q.size()) throw std::invalid_argument("multi-index length mismatch");
  for (std::size_t j = 0; j < p.size(); ++j)
    if (p[j] + q[j] > 0)
      factors_.push_back({static_cast<std::uint32_t>(j), p[j], q[j]});
}

Monomial Monomial::single(std::uint32_t var, std::uint32_t p, std::uint32_t q) {
  if (p + q == 0) return Monomial();
  return Monomial(std::vector<Factor>{{var, p, q}});
}

Monomial Monomial::from_factors(std::vector<Factor> factors) {
  std::erase_if(factors, [](const Factor& f) { return f.p + f.q == 0; });
  for (std::size_t i = 1; i < factors.size(); ++i)
    if (factors[i - 1].var >= factors[i].var)
      throw std::invalid_argument("monomial factors must have increasing variables");
  return Monomial(std::move(factors));
}

unsigned Monomial::p(std::uint32_t var) const {
  for (const auto& f : factors_)
    if (f.var == var) return f.p;
  return 0;
}

unsigned Monomial::q(std::uint32_t var) const {
  for (const auto& f : factors_)
    if (f.var == var) return f.q;
  return 0;
}

unsigned Monomial::degree_z() const {
  unsigned s = 0;
  for (const auto& f : factors_) s += f.p;
  return s;
}

unsigned Monomial::degree_zbar() const {
  unsigned s = 0;
  for (const auto& f : factors_) s += f.q;
  return s;
}

unsigned Monomial::total_degree() const { return degree_z() + degree_zbar(); }

bool Monomial::is_balanced() const {
  return std::all_of(factors_.begin(), factors_.end(), [](const Factor& f) { return f.p == f.q; });
}

Monomial Monomial::conj() const {
  std::vector<Factor> out = factors_;
  for (auto& f : out) std::swap(f.p, f.q);
  return Monomial(std::move(out));
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  std::vector<Factor> out;
  out.reserve(a.factors_.size() + b.factors_.size());
  auto ia = a.factors_.begin(), ib = b.factors_.begin();
  while (ia != a.factors_.end() || ib != b.factors_.end()) {
    if (ib == b.factors_.end() || (ia != a.factors_.end() && ia->var < ib->var)) {
      out.push_back(*ia++);
    } else if (ia == a.factors_.end() || ib->var < ia->var) {
      out.push_back(*ib++);
    } else {
      out.push_back({ia->var, ia->p + ib->p, ia->q + ib->q});
      ++ia;
      ++ib;
    }
  }
  return Monomial(std::move(out));
}

// ---------------------------------------------------------------- CWPoly

CWPoly CWPoly::constant(std::size_t n, const RationalComplex& c) {
  CWPoly f(n);
  f.add_term(Monomial(), c);
  return f;
}

CWPoly CWPoly::z(std::size_t n, std::size_t var) {
  if (var >= n) throw std::out_of_range("variable index out of range");
  return monomial(n, Monomial::single(static_cast<std::uint32_t>(var), 1, 0));
}

CWPoly CWPoly::zbar(std::size_t n, std::size_t var) {
  if (var >= n) throw std::out_of_range("variable index out of range");
  return monomial(n, Monomial::single(static_cast<std::uint32_t>(var), 0, 1));
}

CWPoly CWPoly::monomial(std::size_t n, const Monomial& m, const RationalComplex& c) {
  if (m.span() > n) throw std::out_of_range("monomial uses a variable beyond n");
  CWPoly f(n);
  f.add_term(m, c);
  return f;
}

unsigned CWPoly::degree() const {
  unsigned deg = 0;
  for (const auto& [m, c] : terms_) deg = std::max(deg, m.total_degree());
  return deg;
}

RationalComplex CWPoly::constant_term() const { return coefficient(Monomial()); }

RationalComplex CWPoly::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? RationalComplex() : it->second;
}

void CWPoly::add_term(const Monomial& m, const RationalComplex& c) {
  if (c.is_zero()) return;
  if (m.span() > n_) throw std::out_of_range("monomial uses a variable beyond n");
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

CWPoly CWPoly::conj() const {
  CWPoly out(n_);
  for (const auto& [m, c] : terms_) out.terms_.emplace(m.conj(), c.conj());
  return out;
}

CWPoly CWPoly::scaled(const RationalComplex& s) const {
  CWPoly out = *this;
  out *= s;
  return out;
}

CWPoly CWPoly::widened(std::size_t n) const {
  if (n < n_) throw std::invalid_argument("cannot narrow a polynomial");
  CWPoly out = *this;
  out.n_ = n;
  return out;
}

CWPoly& CWPoly::operator+=(const CWPoly& o) {
  if (n_ != o.n_) throw std::invalid_argument("variable-count mismatch");
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

CWPoly& CWPoly::operator-=(const CWPoly& o) {
  if (n_ != o.n_) throw std::invalid_argument("variable-count mismatch");
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

CWPoly& CWPoly::operator*=(const RationalComplex& s) {
  if (s.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= s;
  return *this;
}

CWPoly operator*(const CWPoly& a, const CWPoly& b) {
  if (a.n_ != b.n_) throw std::invalid_argument("variable-count mismatch");
  CWPoly out(a.n_);
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
  return out;
}

std::string CWPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.to_string() << ")";
    for (const auto& f : m.factors()) {
      if (f.p > 0) os << "*z" << f.var + 1 << (f.p > 1 ? "^" + std::to_string(f.p) : "");
      if (f.q > 0) os << "*zb" << f.var + 1 << (f.q > 1 ? "^" + std::to_string(f.q) : "");
    }
  }
  return os.str();
}

CWPoly poly_arith(const CWPoly& a, const CWPoly& b, PolyOp op, const RationalComplex& factor) {
  switch (op) {
    case PolyOp::add:
      return a + b;
    case PolyOp::mul:
      return a * b;
    case PolyOp::conj:
      return a.conj();
    case PolyOp::scale:
      return a.scaled(factor);
  }
  throw std::invalid_argument("unknown polynomial operation");
}

CWPoly wirtinger_diff(const CWPoly& f, std::size_t var, bool bar) {
  if (var >= f.num_vars()) throw std::out_of_range("variable index out of range");
  CWPoly out(f.num_vars());
  const auto v = static_cast<std::uint32_t>(var);
  for (const auto& [m, c] : f.terms()) {
    const unsigned power = bar ? m.q(v) : m.p(v);
    if (power == 0) continue;
    std::vector<Factor> lowered = m.factors();
    for (auto& g : lowered)
      if (g.var == v) (bar ? g.q : g.p) -= 1;
    out.add_term(Monomial::from_factors(std::move(lowered)), c * RationalComplex(Rational(power)));
  }
  return out;
}

// ---------------------------------------------------------------- expectations

namespace {

Rational balanced_moment(const Monomial& m) {
  Rational r(1);
  for (const auto& f : m.factors()) r *= factorial(f.p);
  return r;
}

// Charge vector p_j - q_j; only products of opposite charges can be balanced.
struct ChargeKey {
  std::vector<std::pair<std::uint32_t, std::int64_t>> charges;
  bool operator==(const ChargeKey&) const = default;
};

struct ChargeHash {
  std::size_t operator()(const ChargeKey& k) const {
    std::size_t h = 1469598103934665603ull;
    for (const auto& [v, c] : k.charges) {
      h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      h ^= static_cast<std::size_t>(c) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

ChargeKey charge_of(const Monomial& m, bool negate) {
  ChargeKey k;
  for (const auto& f : m.factors()) {
    std::int64_t c = static_cast<std::int64_t>(f.p) - static_cast<std::int64_t>(f.q);
    if (c != 0) k.charges.emplace_back(f.var, negate ? -c : c);
  }
  return k;
}

template <typename Scalar>
Scalar permanent(std::vector<Scalar>& m, std::size_t size) {
  // Ryser's formula.
  if (size == 0) return Scalar(1);
  if (size > 24) throw std::invalid_argument("monomial degree too large for Wick expansion");
  Scalar total(0);
  const std::uint64_t subsets = std::uint64_t{1} << size;
  std::vector<Scalar> row_sums(size, Scalar(0));
  // Gray-code enumeration of column subsets.
  std::uint64_t gray_prev = 0;
  for (std::uint64_t s = 1; s < subsets; ++s) {
    const std::uint64_t gray = s ^ (s >> 1);
    const std::uint64_t changed = gray ^ gray_prev;
    const std::size_t col = static_cast<std::size_t>(__builtin_ctzll(changed));
    const bool added = (gray & changed) != 0;
    for (std::size_t r = 0; r < size; ++r) {
      if (added)
        row_sums[r] += m[r * size + col];
      else
        row_sums[r] -= m[r * size + col];
    }
    gray_prev = gray;
    Scalar prod = row_sums[0];
    for (std::size_t r = 1; r < size; ++r) prod *= row_sums[r];
    const int bits = __builtin_popcountll(gray);
    if (((static_cast<int>(size) - bits) & 1) == 0)
      total += prod;
    else
      total -= prod;
  }
  return total;
}

template <typename Scalar, typename SigmaAt>
Scalar wick_moment(const Monomial& mono, SigmaAt sigma_at) {
  std::vector<std::uint32_t> zs, zbs;
  for (const auto& f : mono.factors()) {
    zs.insert(zs.end(), f.p, f.var);
    zbs.insert(zbs.end(), f.q, f.var);
  }
  if (zs.size() != zbs.size()) return Scalar(0);
  const std::size_t m = zs.size();
  std::vector<Scalar> mat;
  mat.reserve(m * m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) mat.push_back(sigma_at(zs[a], zbs[b]));
  return permanent(mat, m);
}

}  // namespace

RationalComplex gaussian_expectation(const CWPoly& f) {
  RationalComplex total;
  for (const auto& [m, c] : f.terms())
    if (m.is_balanced()) total += c * RationalComplex(balanced_moment(m));
  return total;
}

RationalComplex expectation_of_product(const CWPoly& a, const CWPoly& b) {
  if (a.num_vars() != b.num_vars()) throw std::invalid_argument("variable-count mismatch");
  std::unordered_map<ChargeKey, std::vector<const CWPoly::TermMap::value_type*>, ChargeHash>
      groups;
  for (const auto& term : b.terms()) groups[charge_of(term.first, false)].push_back(&term);
  RationalComplex total;
  for (const auto& [ma, ca] : a.terms()) {
    auto it = groups.find(charge_of(ma, true));
    if (it == groups.end()) continue;
    for (const auto* tb : it->second) {
      const Monomial prod = ma * tb->first;
      total += ca * tb->second * RationalComplex(balanced_moment(prod));
    }
  }
  return total;
}

RationalComplex inner_product(const CWPoly& f, const CWPoly& g) {
  return expectation_of_product(f, g.conj());
}

RationalComplex gaussian_expectation(const CWPoly& f, const RationalMatrix& sigma) {
  if (sigma.dim() < f.num_vars()) throw std::invalid_argument("covariance dimension too small");
  RationalComplex total;
  for (const auto& [m, c] : f.terms()) {
    if (m.degree_z() != m.degree_zbar()) continue;
    total += c * wick_moment<RationalComplex>(
                     m, [&](std::uint32_t i, std::uint32_t j) { return sigma(i, j); });
  }
  return total;
}

cplx gaussian_expectation(const CWPoly& f, std::span<const cplx> sigma) {
  const std::size_t d = f.num_vars();
  if (sigma.size() != d * d) throw std::invalid_argument("covariance must be n x n");
  cplx total = 0.0;
  for (const auto& [m, c] : f.terms()) {
    if (m.degree_z() != m.degree_zbar()) continue;
    total += c.to_complex() *
             wick_moment<cplx>(m, [&](std::uint32_t i, std::uint32_t j) { return sigma[i * d + j]; });
  }
  return total;
}

// ---------------------------------------------------------------- evaluation

cplx evaluate(const CWPoly& f, std::span<const cplx> point) {
  if (point.size() != f.num_vars()) throw std::invalid_argument("point length must equal n");
  return CompiledPoly(f)(point);
}

Jet2 evaluate(const CWPoly& f, std::span<const Jet2> point) {
  if (point.size() != f.num_vars()) throw std::invalid_argument("point length must equal n");
  const std::size_t d = point.empty() ? 0 : point.front().dim();
  Jet2 total(d, 0.0);
  std::vector<Jet2> conj_point;
  conj_point.reserve(point.size());
  for (const auto& j : point) conj_point.push_back(j.conj());
  for (const auto& [m, c] : f.terms()) {
    Jet2 term(d, c.to_complex());
    for (const auto& fac : m.factors()) {
      if (fac.p > 0) term = term * pow(point[fac.var], fac.p);
      if (fac.q > 0) term = term * pow(conj_point[fac.var], fac.q);
    }
    total += term;
  }
  return total;
}

CompiledPoly::CompiledPoly(const CWPoly& f) : n_(f.num_vars()) {
  terms_.reserve(f.size());
  for (const auto& [m, c] : f.terms()) {
    terms_.push_back({c.to_complex(), m.factors()});
    for (const auto& fac : m.factors()) max_power_ = std::max({max_power_, fac.p, fac.q});
  }
}

cplx CompiledPoly::operator()(std::span<const cplx> point) const {
  if (point.size() != n_) throw std::invalid_argument("point length must equal n");
  cplx total = 0.0;
  for (const auto& t : terms_) {
    cplx v = t.coeff;
    for (const auto& fac : t.factors) {
      const cplx z = point[fac.var];
      const cplx zb = std::conj(z);
      for (unsigned i = 0; i < fac.p; ++i) v *= z;
      for (unsigned i = 0; i < fac.q; ++i) v *= zb;
    }
    total += v;
  }
  return total;
}

}  // namespace cwchaos
