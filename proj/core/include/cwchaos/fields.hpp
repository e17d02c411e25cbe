#pragma once

// Scalar fields on C^d with value and Wirtinger derivatives up to order two,
// evaluated without per-call allocation in Monte Carlo loops.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "cwchaos/cpoly.hpp"
#include "cwchaos/wirtinger.hpp"

namespace cwchaos {

struct GradientSup {
  double dz = 0.0;     // max_j sup |d h / dz_j|
  double dzbar = 0.0;  // max_j sup |d h / dzbar_j|
};

class ScalarField {
 public:
  virtual ~ScalarField() = default;

  virtual std::size_t dim() const = 0;
  virtual std::string name() const = 0;
  virtual cplx value(std::span<const cplx> z) const = 0;
  // Fills `out` (resized to dim() if needed) with the value and derivatives at z.
  virtual void jet(std::span<const cplx> z, Jet2& out) const = 0;

  // Exact form when the field is a polynomial.
  virtual const CWPoly* polynomial() const { return nullptr; }
  // Known sup-norms of the first derivatives, if finite and available in closed form.
  virtual std::optional<GradientSup> gradient_sup() const { return std::nullopt; }
};

using FieldPtr = std::shared_ptr<const ScalarField>;

FieldPtr make_poly_field(CWPoly f, std::string name = {});
// Generic AD field; `fn` is evaluated on seeded coordinate jets.
FieldPtr make_jet_field(std::size_t d, JetField fn, std::string name);
// exp(-sum_j |z_j|^2) with closed-form derivatives.
FieldPtr make_gaussian_bump_field(std::size_t d);

}  // namespace cwchaos
