#pragma once

// Complex Ornstein-Uhlenbeck generator on C^n, carre du champ, pseudo-inverse,
// eigenspace projections and the exact spectral inequalities.

#include <cstddef>
#include <vector>

#include "cwchaos/cpoly.hpp"
#include "cwchaos/hermite.hpp"
#include "cwchaos/rational.hpp"

namespace cwchaos {

// A polynomial in ker(L + lambda Id).
class Eigenfunction {
 public:
  Eigenfunction() = default;
  // Throws std::invalid_argument unless the Hermite support is exactly {eigenvalue}
  // (the zero polynomial is accepted for any eigenvalue).
  Eigenfunction(CWPoly poly, unsigned eigenvalue);
  // Infers the eigenvalue; throws for zero or mixed-support input.
  static Eigenfunction from_poly(CWPoly poly);

  const CWPoly& poly() const { return poly_; }
  unsigned eigenvalue() const { return eigenvalue_; }
  std::size_t num_vars() const { return poly_.num_vars(); }

 private:
  CWPoly poly_;
  unsigned eigenvalue_ = 0;
};

// F = sqrt(scale_sq) * (F_1, ..., F_d). The common scale keeps irrational
// normalizations such as n^{-1/2} out of the exact coefficients; every moment
// of total order 2k picks up scale_sq^k.
struct ChaoticVector {
  std::vector<Eigenfunction> components;
  Rational scale_sq{1};

  std::size_t dim() const { return components.size(); }
  std::size_t num_vars() const;
  // Throws unless all components share n and are exactly centered.
  void validate_centered() const;
};

namespace ou {

enum class LRoute { hermite, differential };
enum class GammaRoute { closed_form, defining };

CWPoly apply_L(const CWPoly& f, LRoute route = LRoute::differential);

// Gamma(f, g), sesquilinear: linear in f, conjugate-linear in g.
CWPoly gamma(const CWPoly& f, const CWPoly& g, GammaRoute route = GammaRoute::closed_form);

// Throws std::invalid_argument when E[f] != 0.
CWPoly apply_L_inverse(const CWPoly& f);

CWPoly project(const CWPoly& f, unsigned lambda);

bool is_jointly_chaotic(const Eigenfunction& f1, const Eigenfunction& f2);
bool is_chaotic(const ChaoticVector& v);

// Substitutes z_j -> F_j and zbar_j -> conj(F_j) in phi (phi has F.size() variables).
CWPoly compose(const CWPoly& phi, const std::vector<CWPoly>& F);

struct Thm3Result {
  Rational lhs;    // int F (L + eta)^2 Fbar
  Rational mid;    // eta int F (L + eta) Fbar
  Rational first;  // int F (L + eta) Fbar
  Rational rhs;    // c * lhs
  Rational c;      // 1 / min({eta - lambda_k : 0 <= k <= lambda_p} \ {0}), 0 when empty
  bool holds = false;  // lhs <= mid and first <= rhs
};

// lambda_p is taken from the Hermite support of f. Throws when eta < lambda_p.
Thm3Result check_thm3(const CWPoly& f, const Rational& eta);

struct Cor1Result {
  Rational lhs;  // int |Gamma(F1, F2)|^2
  Rational rhs;  // (p1 + p2)/2 * int conj(F1) F2 Gamma(F1, F2)
  bool rhs_real = false;
  bool holds = false;  // rhs_real, rhs >= 0 and lhs <= rhs
};

// Throws std::invalid_argument for a pair that is not jointly chaotic.
Cor1Result check_cor1(const Eigenfunction& f1, const Eigenfunction& f2);

}  // namespace ou

}  // namespace cwchaos
