#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace cwchaos {

using Rational = mpq_class;
using cplx = std::complex<double>;

// Parses "a", "-a" or "a/b" into a canonical rational. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

// Always "a/b" in lowest terms with b >= 1, including integers ("3/1").
std::string rational_to_string(const Rational& r);

Rational factorial(unsigned n);
Rational binomial(unsigned n, unsigned k);

// Exact square root if r is the square of a rational, otherwise false.
bool exact_sqrt(const Rational& r, Rational& root);

// Rational bounds lo <= sqrt(r) <= hi with hi - lo <= 2^-bits (r >= 0).
void sqrt_bounds(const Rational& r, unsigned bits, Rational& lo, Rational& hi);

// Exact Gaussian-rational complex number re + i*im.
class RationalComplex {
 public:
  RationalComplex() = default;
  RationalComplex(Rational re) : re_(std::move(re)) { canonicalize(); }  // NOLINT(implicit)
  RationalComplex(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {
    canonicalize();
  }
  RationalComplex(long re) : re_(re) {}  // NOLINT(implicit)
  RationalComplex(int re) : re_(re) {}  // NOLINT(implicit)

  static RationalComplex i() { return {Rational(0), Rational(1)}; }

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }

  RationalComplex conj() const { return {re_, -im_}; }
  // |z|^2, exact.
  Rational norm() const { return re_ * re_ + im_ * im_; }
  RationalComplex inverse() const;

  cplx to_complex() const { return {re_.get_d(), im_.get_d()}; }

  RationalComplex& operator+=(const RationalComplex& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  RationalComplex& operator-=(const RationalComplex& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  RationalComplex& operator*=(const RationalComplex& o);
  RationalComplex& operator/=(const RationalComplex& o) { return *this *= o.inverse(); }

  friend RationalComplex operator+(RationalComplex a, const RationalComplex& b) { return a += b; }
  friend RationalComplex operator-(RationalComplex a, const RationalComplex& b) { return a -= b; }
  friend RationalComplex operator*(RationalComplex a, const RationalComplex& b) { return a *= b; }
  friend RationalComplex operator/(RationalComplex a, const RationalComplex& b) { return a /= b; }
  friend RationalComplex operator-(const RationalComplex& a) { return {-a.re_, -a.im_}; }

  friend bool operator==(const RationalComplex& a, const RationalComplex& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const RationalComplex& a, const RationalComplex& b) { return !(a == b); }

  std::string to_string() const;

 private:
  void canonicalize() {
    re_.canonicalize();
    im_.canonicalize();
  }

  Rational re_{0};
  Rational im_{0};
};

// Dense square matrix of exact complex entries, row-major.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  explicit RationalMatrix(std::size_t d) : d_(d), a_(d * d) {}

  static RationalMatrix identity(std::size_t d);
  static RationalMatrix scalar(std::size_t d, const Rational& s);

  std::size_t dim() const { return d_; }
  RationalComplex& operator()(std::size_t j, std::size_t k) { return a_[j * d_ + k]; }
  const RationalComplex& operator()(std::size_t j, std::size_t k) const { return a_[j * d_ + k]; }

  bool is_hermitian() const;
  std::vector<cplx> to_complex() const;

  friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
    return a.d_ == b.d_ && a.a_ == b.a_;
  }

 private:
  std::size_t d_ = 0;
  std::vector<RationalComplex> a_;
};

}  // namespace cwchaos
