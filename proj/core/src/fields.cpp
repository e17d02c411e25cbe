#include "cwchaos/fields.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cwchaos {

namespace {

class PolyField final : public ScalarField {
 public:
  PolyField(CWPoly f, std::string name) : poly_(std::move(f)), name_(std::move(name)) {
    d_ = poly_.num_vars();
    if (name_.empty()) name_ = poly_.to_string();
    value_ = CompiledPoly(poly_);
    const std::size_t m = 2 * d_;
    for (std::size_t a = 0; a < m; ++a) {
      CWPoly da = wirtinger_diff(poly_, a % d_, a >= d_);
      if (!da.is_zero()) grad_.push_back({a, 0, CompiledPoly(da)});
      for (std::size_t b = 0; b < m; ++b) {
        CWPoly dab = wirtinger_diff(da, b % d_, b >= d_);
        if (!dab.is_zero()) hess_.push_back({a, b, CompiledPoly(dab)});
      }
    }
  }

  std::size_t dim() const override { return d_; }
  std::string name() const override { return name_; }
  cplx value(std::span<const cplx> z) const override { return value_(z); }

  void jet(std::span<const cplx> z, Jet2& out) const override {
    if (out.dim() != d_) out = Jet2(d_, 0.0);
    else out *= 0.0;
    out.value_ref() = value_(z);
    for (const auto& g : grad_) out.grad_ref(g.a) = g.poly(z);
    for (const auto& h : hess_) out.hess_ref(h.a, h.b) = h.poly(z);
  }

  const CWPoly* polynomial() const override { return &poly_; }

  std::optional<GradientSup> gradient_sup() const override {
    // Finite only for affine polynomials, whose derivatives are constant.
    if (poly_.degree() > 1) return std::nullopt;
    GradientSup s;
    for (std::size_t j = 0; j < d_; ++j) {
      s.dz = std::max(s.dz, std::abs(wirtinger_diff(poly_, j, false).constant_term().to_complex()));
      s.dzbar =
          std::max(s.dzbar, std::abs(wirtinger_diff(poly_, j, true).constant_term().to_complex()));
    }
    return s;
  }

 private:
  struct Slot {
    std::size_t a;
    std::size_t b;
    CompiledPoly poly;
  };
  CWPoly poly_;
  std::string name_;
  std::size_t d_ = 0;
  CompiledPoly value_;
  std::vector<Slot> grad_;
  std::vector<Slot> hess_;
};

class AdField final : public ScalarField {
 public:
  AdField(std::size_t d, JetField fn, std::string name)
      : d_(d), fn_(std::move(fn)), name_(std::move(name)) {}

  std::size_t dim() const override { return d_; }
  std::string name() const override { return name_; }
  cplx value(std::span<const cplx> z) const override { return fn_(Jet2::seed(z)).value(); }
  void jet(std::span<const cplx> z, Jet2& out) const override {
    if (z.size() != d_) throw std::invalid_argument("point dimension mismatch");
    out = fn_(Jet2::seed(z));
  }

 private:
  std::size_t d_;
  JetField fn_;
  std::string name_;
};

class GaussianBumpField final : public ScalarField {
 public:
  explicit GaussianBumpField(std::size_t d) : d_(d) {}

  std::size_t dim() const override { return d_; }
  std::string name() const override { return "exp(-|z|^2)"; }
  cplx value(std::span<const cplx> z) const override { return std::exp(-norm2(z)); }

  void jet(std::span<const cplx> z, Jet2& out) const override {
    if (out.dim() != d_) out = Jet2(d_, 0.0);
    const double h = std::exp(-norm2(z));
    out.value_ref() = h;
    for (std::size_t j = 0; j < d_; ++j) {
      const cplx zj = z[j], zbj = std::conj(z[j]);
      out.grad_ref(j) = -zbj * h;
      out.grad_ref(d_ + j) = -zj * h;
      for (std::size_t k = 0; k < d_; ++k) {
        const cplx zk = z[k], zbk = std::conj(z[k]);
        const double delta = j == k ? 1.0 : 0.0;
        out.hess_ref(j, k) = zbj * zbk * h;
        out.hess_ref(d_ + j, d_ + k) = zj * zk * h;
        out.hess_ref(j, d_ + k) = (zbj * zk - delta) * h;
        out.hess_ref(d_ + j, k) = (zj * zbk - delta) * h;
      }
    }
  }

  std::optional<GradientSup> gradient_sup() const override {
    const double s = std::exp(-0.5) / std::sqrt(2.0);
    return GradientSup{s, s};
  }

 private:
  static double norm2(std::span<const cplx> z) {
    double r = 0.0;
    for (const auto& v : z) r += std::norm(v);
    return r;
  }
  std::size_t d_;
};

}  // namespace

FieldPtr make_poly_field(CWPoly f, std::string name) {
  return std::make_shared<PolyField>(std::move(f), std::move(name));
}

FieldPtr make_jet_field(std::size_t d, JetField fn, std::string name) {
  return std::make_shared<AdField>(d, std::move(fn), std::move(name));
}

FieldPtr make_gaussian_bump_field(std::size_t d) { return std::make_shared<GaussianBumpField>(d); }

}  // namespace cwchaos
