#pragma once

// Forward-mode automatic differentiation in the Wirtinger calculus.
//
// A jet on C^d tracks derivatives with respect to the 2d formally independent
// symbols (z_1..z_d, zbar_1..zbar_d). Slot a < d is d/dz_a, slot d + a is
// d/dzbar_a. Second-order jets keep the full 2d x 2d Hessian, so all four
// complex Hessian blocks are stored explicitly:
//
//   dzz(j,k)   = d^2 f / dz_j dz_k
//   dzzb(j,k)  = d^2 f / dz_j dzbar_k
//   dzbz(j,k)  = d^2 f / dzbar_j dz_k
//   dzbzb(j,k) = d^2 f / dzbar_j dzbar_k

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace cwchaos {

using cplx = std::complex<double>;

class Jet1 {
 public:
  Jet1() = default;
  Jet1(std::size_t d, cplx value);

  static Jet1 constant(std::size_t d, cplx value) { return Jet1(d, value); }
  // The coordinate function z_k seeded at `at`.
  static Jet1 coordinate(std::size_t d, std::size_t k, cplx at);

  std::size_t dim() const { return d_; }
  cplx value() const { return data_[0]; }
  cplx dz(std::size_t j) const { return data_[1 + j]; }
  cplx dzbar(std::size_t j) const { return data_[1 + d_ + j]; }
  // Slot a in [0, 2d).
  cplx grad(std::size_t a) const { return data_[1 + a]; }

  cplx& value_ref() { return data_[0]; }
  cplx& grad_ref(std::size_t a) { return data_[1 + a]; }

  Jet1 conj() const;

  Jet1& operator+=(const Jet1& o);
  Jet1& operator-=(const Jet1& o);
  Jet1& operator*=(cplx s);
  friend Jet1 operator+(Jet1 a, const Jet1& b) { return a += b; }
  friend Jet1 operator-(Jet1 a, const Jet1& b) { return a -= b; }
  friend Jet1 operator*(const Jet1& a, const Jet1& b);
  friend Jet1 operator*(Jet1 a, cplx s) { return a *= s; }
  friend Jet1 operator*(cplx s, Jet1 a) { return a *= s; }
  friend Jet1 operator+(Jet1 a, cplx s) {
    a.data_[0] += s;
    return a;
  }
  friend Jet1 operator-(const Jet1& a) { return a * cplx(-1.0); }

 private:
  std::size_t d_ = 0;
  std::vector<cplx> data_;
};

class Jet2 {
 public:
  Jet2() = default;
  Jet2(std::size_t d, cplx value);

  static Jet2 constant(std::size_t d, cplx value) { return Jet2(d, value); }
  static Jet2 coordinate(std::size_t d, std::size_t k, cplx at);
  // Seeds all coordinates of the point z; returns d jets.
  static std::vector<Jet2> seed(std::span<const cplx> z);

  std::size_t dim() const { return d_; }
  cplx value() const { return data_[0]; }
  cplx dz(std::size_t j) const { return grad(j); }
  cplx dzbar(std::size_t j) const { return grad(d_ + j); }
  cplx grad(std::size_t a) const { return data_[1 + a]; }
  // Full Hessian over slots a, b in [0, 2d).
  cplx hess(std::size_t a, std::size_t b) const { return data_[1 + 2 * d_ + a * 2 * d_ + b]; }

  cplx dzz(std::size_t j, std::size_t k) const { return hess(j, k); }
  cplx dzzb(std::size_t j, std::size_t k) const { return hess(j, d_ + k); }
  cplx dzbz(std::size_t j, std::size_t k) const { return hess(d_ + j, k); }
  cplx dzbzb(std::size_t j, std::size_t k) const { return hess(d_ + j, d_ + k); }

  cplx& value_ref() { return data_[0]; }
  cplx& grad_ref(std::size_t a) { return data_[1 + a]; }
  cplx& hess_ref(std::size_t a, std::size_t b) { return data_[1 + 2 * d_ + a * 2 * d_ + b]; }

  Jet1 first_order() const;
  Jet2 conj() const;

  Jet2& operator+=(const Jet2& o);
  Jet2& operator-=(const Jet2& o);
  Jet2& operator*=(cplx s);
  friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
  friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
  friend Jet2 operator*(const Jet2& a, const Jet2& b);
  friend Jet2 operator*(Jet2 a, cplx s) { return a *= s; }
  friend Jet2 operator*(cplx s, Jet2 a) { return a *= s; }
  friend Jet2 operator+(Jet2 a, cplx s) {
    a.data_[0] += s;
    return a;
  }
  friend Jet2 operator-(Jet2 a, cplx s) {
    a.data_[0] -= s;
    return a;
  }
  friend Jet2 operator-(const Jet2& a) { return a * cplx(-1.0); }

 private:
  std::size_t d_ = 0;
  std::vector<cplx> data_;
};

enum class JetOp { add, mul, conj, scale };

// Dispatching form of the jet arithmetic. `scale` multiplies a by `factor`;
// conj ignores b. Throws std::invalid_argument on dimension mismatch.
Jet2 jet_arith(const Jet2& a, const Jet2& b, JetOp op, cplx factor = 1.0);

// Value and Wirtinger derivatives up to order two of a scalar field of one
// complex variable w, evaluated at some point. Mixed partials are assumed equal.
struct OuterDerivatives {
  cplx value;
  cplx dw;
  cplx dwbar;
  cplx dww;
  cplx dwwbar;
  cplx dwbarwbar;
};

// Two-term Wirtinger chain rule:
//   d(f o g) = (df/dw o g) dg + (df/dwbar o g) d(conj g), and its second-order extension.
Jet2 jet_compose(const OuterDerivatives& outer, const Jet2& inner);
Jet1 jet_compose(const OuterDerivatives& outer, const Jet1& inner);

// Elementary function table.
OuterDerivatives outer_exp(cplx w);
OuterDerivatives outer_conj(cplx w);
OuterDerivatives outer_abs2(cplx w);
OuterDerivatives outer_power(cplx w, unsigned p);

Jet2 exp(const Jet2& a);
Jet1 exp(const Jet1& a);
Jet2 pow(const Jet2& a, unsigned p);

// A scalar field on C^d, evaluated on seeded coordinate jets.
using JetField = std::function<Jet2(std::span<const Jet2>)>;

// Maximum deviation between AD derivatives of `field` at `point` and central
// finite differences of the (x, y) representation, combined through
// d/dz = (d/dx - i d/dy)/2 and d/dzbar = (d/dx + i d/dy)/2. First derivatives are
// compared against differences of values, second derivatives against
// differences of AD gradients. Each deviation is scaled by max(1, |AD value|).
// Throws std::domain_error if the field is not finite near the point.
double check_against_finite_differences(const JetField& field, std::span<const cplx> point,
                                        double h);

}  // namespace cwchaos
