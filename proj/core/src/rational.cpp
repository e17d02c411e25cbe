#include "cwchaos/rational.hpp"

#include <stdexcept>

namespace cwchaos {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  while (!s.empty() && s.back() == ' ') s.pop_back();
  if (s.empty()) throw std::invalid_argument("empty rational string");
  if (s.front() == '+') s.erase(s.begin());
  std::size_t slash = s.find('/');
  auto digits_ok = [](std::string_view part, bool allow_sign) {
    if (part.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && part[0] == '-') i = 1;
    if (i == part.size()) return false;
    for (; i < part.size(); ++i)
      if (part[i] < '0' || part[i] > '9') return false;
    return true;
  };
  std::string_view num = std::string_view(s).substr(0, slash);
  std::string_view den = slash == std::string::npos ? std::string_view("1")
                                                    : std::string_view(s).substr(slash + 1);
  if (!digits_ok(num, true) || !digits_ok(den, false))
    throw std::invalid_argument("malformed rational string: '" + std::string(text) + "'");
  mpz_class n{std::string(num)}, d{std::string(den)};
  if (d == 0) throw std::invalid_argument("zero denominator in rational string");
  Rational r(n, d);
  r.canonicalize();
  return r;
}

std::string rational_to_string(const Rational& r) {
  Rational c = r;
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Rational factorial(unsigned n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return Rational(f);
}

Rational binomial(unsigned n, unsigned k) {
  if (k > n) return Rational(0);
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), n, k);
  return Rational(b);
}

bool exact_sqrt(const Rational& r, Rational& root) {
  if (sgn(r) < 0) return false;
  const mpz_class& num = r.get_num();
  const mpz_class& den = r.get_den();
  if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
    return false;
  mpz_class sn, sd;
  mpz_sqrt(sn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(sd.get_mpz_t(), den.get_mpz_t());
  root = Rational(sn, sd);
  root.canonicalize();
  return true;
}

void sqrt_bounds(const Rational& r, unsigned bits, Rational& lo, Rational& hi) {
  if (sgn(r) < 0) throw std::domain_error("square root of a negative rational");
  // floor(sqrt(r * 4^bits)) / 2^bits, with r * 4^bits rounded down first.
  mpz_class scale = 1;
  mpz_mul_2exp(scale.get_mpz_t(), scale.get_mpz_t(), bits);
  mpz_class scaled = (r.get_num() * scale * scale) / r.get_den();
  mpz_class root;
  mpz_sqrt(root.get_mpz_t(), scaled.get_mpz_t());
  lo = Rational(root, scale);
  hi = Rational(root + 1, scale);
  lo.canonicalize();
  hi.canonicalize();
}

RationalComplex RationalComplex::inverse() const {
  Rational n = norm();
  if (sgn(n) == 0) throw std::domain_error("division by exact zero");
  return {re_ / n, -im_ / n};
}

RationalComplex& RationalComplex::operator*=(const RationalComplex& o) {
  if (sgn(im_) == 0 && sgn(o.im_) == 0) {
    re_ *= o.re_;
    return *this;
  }
  Rational re = re_ * o.re_ - im_ * o.im_;
  Rational im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

std::string RationalComplex::to_string() const {
  if (sgn(im_) == 0) return rational_to_string(re_);
  return rational_to_string(re_) + (sgn(im_) < 0 ? " - " : " + ") +
         rational_to_string(abs(im_)) + "i";
}

RationalMatrix RationalMatrix::identity(std::size_t d) { return scalar(d, Rational(1)); }

RationalMatrix RationalMatrix::scalar(std::size_t d, const Rational& s) {
  RationalMatrix m(d);
  for (std::size_t j = 0; j < d; ++j) m(j, j) = RationalComplex(s);
  return m;
}

bool RationalMatrix::is_hermitian() const {
  for (std::size_t j = 0; j < d_; ++j)
    for (std::size_t k = j; k < d_; ++k)
      if ((*this)(j, k) != (*this)(k, j).conj()) return false;
  return true;
}

std::vector<cplx> RationalMatrix::to_complex() const {
  std::vector<cplx> out;
  out.reserve(a_.size());
  for (const auto& v : a_) out.push_back(v.to_complex());
  return out;
}

}  // namespace cwchaos
