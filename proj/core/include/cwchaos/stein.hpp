#pragma once

// Numerical solution of the complex Stein equation
//   <dzbar dz f, conj Sigma> + <dz dzbar f, Sigma> - <grad f, conj z> - <gradbar f, z> = h(z) - E h(Z)
// through the Ornstein-Uhlenbeck semigroup, and checks of its Hessian bounds.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cwchaos/cgauss.hpp"
#include "cwchaos/fields.hpp"
#include "cwchaos/wirtinger.hpp"

namespace cwchaos {

struct SteinSolverConfig {
  std::size_t mc_samples = 200000;
  std::size_t quadrature_nodes = 64;
  double s_max = 0.5 * std::log(1e6);
  std::uint64_t seed = 0;
  std::size_t threads = 0;

  // Throws std::invalid_argument unless s_max > 0, nodes >= 8 and mc_samples >= 2.
  void validate() const;
};

// sqrt(lambda_max) / lambda_min. Throws for a singular or non-Hermitian matrix.
double stein_constant(const ComplexMatrix& sigma);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_legendre(std::size_t n, double a, double b);

// Holds one frozen sample of Z ~ CN_d(0, Sigma), in antithetic pairs, shared by
// every quadrature node and every point, so the estimate of U_h is a smooth
// deterministic function of z and its jet is the jet of the estimator.
class SteinSolver {
 public:
  SteinSolver(FieldPtr h, GaussianSpec spec, SteinSolverConfig cfg);

  // int_0^{s_max} (E h(e^{-s} z + sqrt(1 - e^{-2s}) Z) - E h(Z)) ds, with its jet in z.
  Jet2 semigroup_integral(std::span<const cplx> z) const;
  // U_h = -semigroup_integral: the solution of the Stein equation above.
  Jet2 solve(std::span<const cplx> z) const;

  // Common-random-number estimate of E h(Z) on the frozen sample.
  cplx sample_mean_h() const { return mean_h_; }
  // E h(Z) exactly (Wick moments) for polynomial h, else the sample estimate.
  cplx mean_h() const;

  const GaussianSpec& spec() const { return spec_; }
  const SteinSolverConfig& config() const { return cfg_; }
  const FieldPtr& field() const { return h_; }
  const SampleMatrix& frozen_sample() const { return z_; }

 private:
  FieldPtr h_;
  GaussianSpec spec_;
  SteinSolverConfig cfg_;
  QuadratureRule rule_;
  SampleMatrix z_;
  cplx mean_h_{};
};

Jet2 solve_stein(const FieldPtr& h, const GaussianSpec& spec, std::span<const cplx> z,
                 const SteinSolverConfig& cfg);

// Left side of the Stein equation assembled from the jet of f at z.
cplx stein_equation_lhs(const Jet2& f, const ComplexMatrix& sigma, std::span<const cplx> z);

struct SteinResidualReport {
  std::vector<cplx> point;
  cplx lhs{};
  cplx rhs{};
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed() const { return residual <= tolerance; }
};

std::vector<SteinResidualReport> check_stein_residual(const SteinSolver& solver,
                                                      const std::vector<std::vector<cplx>>& points,
                                                      double tolerance = 2e-2);
std::vector<SteinResidualReport> check_stein_residual(const FieldPtr& h, const GaussianSpec& spec,
                                                      const std::vector<std::vector<cplx>>& points,
                                                      const SteinSolverConfig& cfg,
                                                      double tolerance = 2e-2);

struct HessianBoundPoint {
  std::vector<cplx> point;
  double zzb = 0.0;   // ||dz dzbar U_h||_HS
  double zbz = 0.0;   // ||dzbar dz U_h||_HS
  double zz = 0.0;    // ||dz dz U_h||_HS
  double zbzb = 0.0;  // ||dzbar dzbar U_h||_HS
};

struct HessianBoundReport {
  double alpha = 0.0;
  double c_sigma = 0.0;
  GradientSup sup;
  bool sup_estimated = false;
  double slack = 0.05;
  double mixed_bound = 0.0;  // c (alpha sup|dz h| + (1 - alpha) sup|dzbar h|)
  double zz_bound = 0.0;     // c sup|dz h|
  double zbzb_bound = 0.0;   // c sup|dzbar h|
  std::vector<HessianBoundPoint> points;
  bool passed = false;
};

// Without a supplied or closed-form sup, the gradient sup-norms are estimated as
// the maximum over the frozen sample and the check points.
HessianBoundReport check_hessian_bounds(const SteinSolver& solver,
                                        const std::vector<std::vector<cplx>>& points, double alpha,
                                        double slack = 0.05,
                                        std::optional<GradientSup> sup = std::nullopt);

nlohmann::json to_json(const SteinResidualReport& r);
nlohmann::json to_json(const HessianBoundReport& r);

}  // namespace cwchaos
