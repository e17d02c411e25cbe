#include "cwchaos/wirtinger.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cwchaos {

namespace {

void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("jet dimension mismatch");
}

// Slot of the conjugate symbol: z_j <-> zbar_j.
inline std::size_t bar(std::size_t a, std::size_t d) { return a < d ? a + d : a - d; }

}  // namespace

// ---------------------------------------------------------------- Jet1

Jet1::Jet1(std::size_t d, cplx value) : d_(d), data_(1 + 2 * d) { data_[0] = value; }

Jet1 Jet1::coordinate(std::size_t d, std::size_t k, cplx at) {
  if (k >= d) throw std::out_of_range("coordinate index out of range");
  Jet1 j(d, at);
  j.data_[1 + k] = 1.0;
  return j;
}

Jet1 Jet1::conj() const {
  Jet1 out(d_, std::conj(data_[0]));
  for (std::size_t a = 0; a < 2 * d_; ++a) out.data_[1 + a] = std::conj(data_[1 + bar(a, d_)]);
  return out;
}

Jet1& Jet1::operator+=(const Jet1& o) {
  require_same_dim(d_, o.d_);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Jet1& Jet1::operator-=(const Jet1& o) {
  require_same_dim(d_, o.d_);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

Jet1& Jet1::operator*=(cplx s) {
  for (auto& v : data_) v *= s;
  return *this;
}

Jet1 operator*(const Jet1& a, const Jet1& b) {
  require_same_dim(a.d_, b.d_);
  Jet1 out(a.d_, a.data_[0] * b.data_[0]);
  for (std::size_t i = 1; i < a.data_.size(); ++i)
    out.data_[i] = a.data_[i] * b.data_[0] + a.data_[0] * b.data_[i];
  return out;
}

// ---------------------------------------------------------------- Jet2

Jet2::Jet2(std::size_t d, cplx value) : d_(d), data_(1 + 2 * d + 4 * d * d) { data_[0] = value; }

Jet2 Jet2::coordinate(std::size_t d, std::size_t k, cplx at) {
  if (k >= d) throw std::out_of_range("coordinate index out of range");
  Jet2 j(d, at);
  j.data_[1 + k] = 1.0;
  return j;
}

std::vector<Jet2> Jet2::seed(std::span<const cplx> z) {
  std::vector<Jet2> out;
  out.reserve(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) out.push_back(coordinate(z.size(), k, z[k]));
  return out;
}

Jet1 Jet2::first_order() const {
  Jet1 out(d_, data_[0]);
  for (std::size_t a = 0; a < 2 * d_; ++a) out.grad_ref(a) = grad(a);
  return out;
}

Jet2 Jet2::conj() const {
  Jet2 out(d_, std::conj(data_[0]));
  const std::size_t m = 2 * d_;
  for (std::size_t a = 0; a < m; ++a) {
    out.grad_ref(a) = std::conj(grad(bar(a, d_)));
    for (std::size_t b = 0; b < m; ++b) out.hess_ref(a, b) = std::conj(hess(bar(a, d_), bar(b, d_)));
  }
  return out;
}

Jet2& Jet2::operator+=(const Jet2& o) {
  require_same_dim(d_, o.d_);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Jet2& Jet2::operator-=(const Jet2& o) {
  require_same_dim(d_, o.d_);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

Jet2& Jet2::operator*=(cplx s) {
  for (auto& v : data_) v *= s;
  return *this;
}

Jet2 operator*(const Jet2& a, const Jet2& b) {
  require_same_dim(a.d_, b.d_);
  const std::size_t m = 2 * a.d_;
  const cplx av = a.value(), bv = b.value();
  Jet2 out(a.d_, av * bv);
  for (std::size_t i = 0; i < m; ++i) out.grad_ref(i) = a.grad(i) * bv + av * b.grad(i);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      out.hess_ref(i, j) = a.hess(i, j) * bv + a.grad(i) * b.grad(j) + a.grad(j) * b.grad(i) +
                           av * b.hess(i, j);
  return out;
}

Jet2 jet_arith(const Jet2& a, const Jet2& b, JetOp op, cplx factor) {
  switch (op) {
    case JetOp::add:
      return a + b;
    case JetOp::mul:
      return a * b;
    case JetOp::conj:
      return a.conj();
    case JetOp::scale:
      return a * factor;
  }
  throw std::invalid_argument("unknown jet operation");
}

// ---------------------------------------------------------------- chain rule

Jet2 jet_compose(const OuterDerivatives& f, const Jet2& g) {
  const std::size_t d = g.dim();
  const std::size_t m = 2 * d;
  const Jet2 gb = g.conj();
  Jet2 out(d, f.value);
  for (std::size_t a = 0; a < m; ++a) out.grad_ref(a) = f.dw * g.grad(a) + f.dwbar * gb.grad(a);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      out.hess_ref(a, b) = f.dww * g.grad(a) * g.grad(b) +
                           f.dwwbar * (g.grad(a) * gb.grad(b) + gb.grad(a) * g.grad(b)) +
                           f.dwbarwbar * gb.grad(a) * gb.grad(b) + f.dw * g.hess(a, b) +
                           f.dwbar * gb.hess(a, b);
  return out;
}

Jet1 jet_compose(const OuterDerivatives& f, const Jet1& g) {
  const Jet1 gb = g.conj();
  Jet1 out(g.dim(), f.value);
  for (std::size_t a = 0; a < 2 * g.dim(); ++a)
    out.grad_ref(a) = f.dw * g.grad(a) + f.dwbar * gb.grad(a);
  return out;
}

OuterDerivatives outer_exp(cplx w) {
  const cplx e = std::exp(w);
  return {e, e, 0.0, e, 0.0, 0.0};
}

OuterDerivatives outer_conj(cplx w) { return {std::conj(w), 0.0, 1.0, 0.0, 0.0, 0.0}; }

OuterDerivatives outer_abs2(cplx w) { return {std::norm(w), std::conj(w), w, 0.0, 1.0, 0.0}; }

OuterDerivatives outer_power(cplx w, unsigned p) {
  auto ipow = [](cplx x, unsigned k) {
    cplx r = 1.0;
    for (unsigned i = 0; i < k; ++i) r *= x;
    return r;
  };
  const double pd = p;
  const cplx first = p >= 1 ? pd * ipow(w, p - 1) : cplx(0.0);
  const cplx second = p >= 2 ? pd * (pd - 1.0) * ipow(w, p - 2) : cplx(0.0);
  return {ipow(w, p), first, 0.0, second, 0.0, 0.0};
}

Jet2 exp(const Jet2& a) { return jet_compose(outer_exp(a.value()), a); }
Jet1 exp(const Jet1& a) { return jet_compose(outer_exp(a.value()), a); }
Jet2 pow(const Jet2& a, unsigned p) { return jet_compose(outer_power(a.value(), p), a); }

// ---------------------------------------------------------------- FD check

double check_against_finite_differences(const JetField& field, std::span<const cplx> point,
                                        double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  const std::size_t d = point.size();
  const Jet2 ad = field(Jet2::seed(point));

  auto eval_at = [&](const std::vector<cplx>& z) {
    Jet2 j = field(Jet2::seed(z));
    if (!std::isfinite(j.value().real()) || !std::isfinite(j.value().imag()))
      throw std::domain_error("field is not finite near the evaluation point");
    return j;
  };

  double worst = 0.0;
  auto record = [&](cplx ad_value, cplx fd_value) {
    worst = std::max(worst, std::abs(ad_value - fd_value) / std::max(1.0, std::abs(ad_value)));
  };

  const cplx imag(0.0, 1.0);
  std::vector<cplx> z(point.begin(), point.end());
  for (std::size_t j = 0; j < d; ++j) {
    // Central differences along x_j and y_j of the value and of the AD gradient.
    const cplx base = z[j];
    z[j] = base + h;
    const Jet2 xp = eval_at(z);
    z[j] = base - h;
    const Jet2 xm = eval_at(z);
    z[j] = base + imag * h;
    const Jet2 yp = eval_at(z);
    z[j] = base - imag * h;
    const Jet2 ym = eval_at(z);
    z[j] = base;

    auto wirtinger = [&](cplx dx, cplx dy, bool conj_slot) {
      return conj_slot ? 0.5 * (dx + imag * dy) : 0.5 * (dx - imag * dy);
    };
    const cplx dx = (xp.value() - xm.value()) / (2.0 * h);
    const cplx dy = (yp.value() - ym.value()) / (2.0 * h);
    record(ad.dz(j), wirtinger(dx, dy, false));
    record(ad.dzbar(j), wirtinger(dx, dy, true));

    for (std::size_t a = 0; a < 2 * d; ++a) {
      const cplx gx = (xp.grad(a) - xm.grad(a)) / (2.0 * h);
      const cplx gy = (yp.grad(a) - ym.grad(a)) / (2.0 * h);
      record(ad.hess(a, j), wirtinger(gx, gy, false));
      record(ad.hess(a, d + j), wirtinger(gx, gy, true));
    }
  }
  return worst;
}

}  // namespace cwchaos
