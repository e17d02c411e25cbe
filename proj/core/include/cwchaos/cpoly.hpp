#pragma once

// Exact polynomials in the paired symbols (z_1..z_n, zbar_1..zbar_n) with
// Gaussian-rational coefficients, and their exact expectations under the
// standard complex Gaussian product measure (E|Z_j|^2 = 1).

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cwchaos/rational.hpp"
#include "cwchaos/wirtinger.hpp"

namespace cwchaos {

// z_var^p * zbar_var^q, with p + q > 0.
struct Factor {
  std::uint32_t var;
  std::uint32_t p;
  std::uint32_t q;

  friend auto operator<=>(const Factor&, const Factor&) = default;
};

// Product of factors over distinct variables, sorted by variable. The empty
// monomial is the constant 1.
class Monomial {
 public:
  Monomial() = default;
  // From dense multi-indices of equal length; throws on length mismatch.
  Monomial(std::span<const unsigned> p, std::span<const unsigned> q);
  static Monomial single(std::uint32_t var, std::uint32_t p, std::uint32_t q);
  // Factors must have strictly increasing variables; zero-degree factors are dropped.
  static Monomial from_factors(std::vector<Factor> factors);

  const std::vector<Factor>& factors() const { return factors_; }
  bool is_constant() const { return factors_.empty(); }

  unsigned p(std::uint32_t var) const;
  unsigned q(std::uint32_t var) const;
  unsigned total_degree() const;
  unsigned degree_z() const;
  unsigned degree_zbar() const;
  // One past the largest variable index used (0 for constants).
  std::uint32_t span() const { return factors_.empty() ? 0 : factors_.back().var + 1; }
  // p(j) == q(j) for all j: the only monomials with nonzero Gaussian mean.
  bool is_balanced() const;

  Monomial conj() const;
  friend Monomial operator*(const Monomial& a, const Monomial& b);

  friend auto operator<=>(const Monomial&, const Monomial&) = default;
  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  explicit Monomial(std::vector<Factor> f) : factors_(std::move(f)) {}
  std::vector<Factor> factors_;
};

class CWPoly {
 public:
  using TermMap = std::map<Monomial, RationalComplex>;

  CWPoly() = default;
  explicit CWPoly(std::size_t n) : n_(n) {}

  static CWPoly constant(std::size_t n, const RationalComplex& c);
  static CWPoly z(std::size_t n, std::size_t var);
  static CWPoly zbar(std::size_t n, std::size_t var);
  static CWPoly monomial(std::size_t n, const Monomial& m, const RationalComplex& c = 1);

  std::size_t num_vars() const { return n_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  unsigned degree() const;
  // Coefficient of the constant monomial.
  RationalComplex constant_term() const;
  RationalComplex coefficient(const Monomial& m) const;

  // Adds c * m, dropping the term if the result is zero.
  void add_term(const Monomial& m, const RationalComplex& c);

  CWPoly conj() const;
  CWPoly scaled(const RationalComplex& s) const;
  // Same polynomial viewed in a space with more variables.
  CWPoly widened(std::size_t n) const;

  CWPoly& operator+=(const CWPoly& o);
  CWPoly& operator-=(const CWPoly& o);
  CWPoly& operator*=(const RationalComplex& s);
  friend CWPoly operator+(CWPoly a, const CWPoly& b) { return a += b; }
  friend CWPoly operator-(CWPoly a, const CWPoly& b) { return a -= b; }
  friend CWPoly operator-(const CWPoly& a) { return a.scaled(RationalComplex(-1)); }
  friend CWPoly operator*(const CWPoly& a, const CWPoly& b);
  friend CWPoly operator*(CWPoly a, const RationalComplex& s) { return a *= s; }
  friend CWPoly operator*(const RationalComplex& s, CWPoly a) { return a *= s; }

  friend bool operator==(const CWPoly& a, const CWPoly& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const CWPoly& a, const CWPoly& b) { return !(a == b); }

  std::string to_string() const;

 private:
  std::size_t n_ = 0;
  TermMap terms_;
};

enum class PolyOp { add, mul, conj, scale };

// Dispatching form of the ring operations; conj ignores b, scale uses `factor`.
// Throws std::invalid_argument on variable-count mismatch.
CWPoly poly_arith(const CWPoly& a, const CWPoly& b, PolyOp op,
                  const RationalComplex& factor = RationalComplex(1));

// Formal derivative treating z and zbar as independent; `bar` selects d/dzbar.
CWPoly wirtinger_diff(const CWPoly& f, std::size_t var, bool bar);

// E[f(Z)] for independent standard complex Gaussians Z_j:
//   E[prod Z_j^p_j Zbar_j^q_j] = prod p_j! if p == q entrywise, else 0.
RationalComplex gaussian_expectation(const CWPoly& f);

// E[a * b] without materializing the product.
RationalComplex expectation_of_product(const CWPoly& a, const CWPoly& b);
// E[f * conj(g)].
RationalComplex inner_product(const CWPoly& f, const CWPoly& g);

// E[f(Z)] for Z ~ CN_n(0, sigma), by Wick's rule: the moment of a monomial is
// the permanent of the covariance entries between its z- and zbar-factors.
RationalComplex gaussian_expectation(const CWPoly& f, const RationalMatrix& sigma);
cplx gaussian_expectation(const CWPoly& f, std::span<const cplx> sigma_row_major);

// Numeric evaluation with zbar_j = conj(point_j). Throws on length mismatch.
cplx evaluate(const CWPoly& f, std::span<const cplx> point);

// Evaluation on Wirtinger jets: gives the field z -> f(z, zbar) with AD.
Jet2 evaluate(const CWPoly& f, std::span<const Jet2> point);

// Compiled floating-point form for repeated evaluation in Monte Carlo loops.
class CompiledPoly {
 public:
  CompiledPoly() = default;
  explicit CompiledPoly(const CWPoly& f);

  std::size_t num_vars() const { return n_; }
  unsigned degree() const { return max_power_; }
  cplx operator()(std::span<const cplx> point) const;

 private:
  struct Term {
    cplx coeff;
    std::vector<Factor> factors;
  };
  std::size_t n_ = 0;
  unsigned max_power_ = 0;
  std::vector<Term> terms_;
};

}  // namespace cwchaos
