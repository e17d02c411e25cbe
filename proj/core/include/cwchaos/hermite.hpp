#pragma once

// Complex Hermite polynomials H_{p,q} and the product basis of the complex
// Ornstein-Uhlenbeck eigenspaces.
//
// Expansions are stored exactly against the unnormalized products
//   H_{m_p, m_q} = prod_j H_{m_p(j), m_q(j)}(z_j),
// whose squared Gaussian norm is prod_j m_p(j)! m_q(j)!. The orthonormal element
// Phi_{m_p, m_q} is that product divided by the square root of its norm, so a
// Phi-coefficient is the stored coefficient times sqrt(norm_sq), generally
// irrational; it is only produced in floating point.

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "cwchaos/cpoly.hpp"
#include "cwchaos/rational.hpp"

namespace cwchaos {

struct HermiteIndex {
  unsigned p = 0;
  unsigned q = 0;
  unsigned eigenvalue() const { return p + q; }
  friend auto operator<=>(const HermiteIndex&, const HermiteIndex&) = default;
};

// Sparse multi-index pair (m_p, m_q). Factor (j, a, b) stands for H_{a,b}(z_j);
// the eigenvalue of the basis element is the total degree.
using PhiIndex = Monomial;

// A polynomial times the square root of a positive rational: poly * sqrt(scale_sq).
struct ScaledPoly {
  CWPoly poly;
  Rational scale_sq{1};

  cplx evaluate(std::span<const cplx> point) const;
  double scale() const { return std::sqrt(scale_sq.get_d()); }
};

namespace hermite {

// sum_{j=0}^{min(p,q)} C(p,j) C(q,j) j! (-1)^j z^{p-j} zbar^{q-j}, one variable.
CWPoly hermite_poly(int p, int q);
// H_{p,q} in variable `var` of an n-variable space.
CWPoly hermite_poly_in(std::size_t n, std::size_t var, unsigned p, unsigned q);

// Unnormalized product prod_j H_{m_p(j), m_q(j)}(z_j).
CWPoly product_element(std::span<const unsigned> m_p, std::span<const unsigned> m_q);
CWPoly product_element(std::size_t n, const PhiIndex& index);
// prod_j m_p(j)! m_q(j)!
Rational norm_sq(const PhiIndex& index);

// Phi_{m_p, m_q}: the product element over sqrt(norm_sq), so E[Phi conj(Phi)] = 1.
ScaledPoly phi_basis_element(std::span<const unsigned> m_p, std::span<const unsigned> m_q);

}  // namespace hermite

class HermiteExpansion {
 public:
  using CoeffMap = std::map<PhiIndex, RationalComplex>;

  HermiteExpansion() = default;
  explicit HermiteExpansion(std::size_t n) : n_(n) {}

  std::size_t num_vars() const { return n_; }
  const CoeffMap& coefficients() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }

  // Exact coefficient on the unnormalized product element.
  RationalComplex coefficient(const PhiIndex& idx) const;
  // Coefficient on the orthonormal Phi element.
  cplx phi_coefficient(const PhiIndex& idx) const;

  void add(const PhiIndex& idx, const RationalComplex& c);

  // Eigenvalues |m_p| + |m_q| carrying a nonzero coefficient.
  std::set<unsigned> eigenvalue_support() const;
  unsigned max_eigenvalue() const;

  friend bool operator==(const HermiteExpansion& a, const HermiteExpansion& b) {
    return a.n_ == b.n_ && a.coeffs_ == b.coeffs_;
  }

 private:
  std::size_t n_ = 0;
  CoeffMap coeffs_;
};

namespace hermite {

// Coefficients obtained from the exact Gaussian inner products E[f conj(Phi)],
// factorized across the independent coordinates.
HermiteExpansion to_hermite(const CWPoly& f);
CWPoly from_hermite(const HermiteExpansion& e);

}  // namespace hermite

}  // namespace cwchaos
