#pragma once

// Exact identity suite over random polynomial inputs, shared by the CLI and the
// acceptance tests.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cwchaos/cpoly.hpp"
#include "cwchaos/ou.hpp"
#include "cwchaos/rng.hpp"
#include "cwchaos/stein.hpp"

namespace cwchaos {

struct RandomPolyOptions {
  std::size_t num_vars = 2;
  unsigned max_degree = 3;
  std::size_t max_terms = 4;
  int coeff_range = 3;  // numerators in [-range, range], denominators in [1, range]
};

// A random rational coefficient (a + ib) / c, never zero.
RationalComplex random_coefficient(Engine& engine, int range);
CWPoly random_poly(Engine& engine, const RandomPolyOptions& opt);
// Random combination of Hermite product elements of total degree `eigenvalue`.
Eigenfunction random_eigenfunction(Engine& engine, std::size_t num_vars, unsigned eigenvalue,
                                   std::size_t max_terms = 3, int coeff_range = 3);
// Random element of the sum of the eigenspaces 0..max_eigenvalue.
CWPoly random_chaos_poly(Engine& engine, std::size_t num_vars, unsigned max_eigenvalue,
                         std::size_t max_terms = 4, int coeff_range = 3);

struct SuiteResult {
  std::string name;
  std::size_t passed = 0;
  std::size_t failed = 0;
  double seconds = 0.0;
  std::vector<std::string> failures;  // first few failing cases

  bool ok() const { return failed == 0 && passed > 0; }
  void record(bool ok, const std::string& what);
};

struct IdentitySuiteConfig {
  std::uint64_t seed = 0;
  std::size_t num_pairs = 200;       // Gamma routes and integration by parts
  std::size_t num_spot_checks = 20;  // diffusion property and chain rule
  std::size_t num_spectral = 100;    // spectral and Gamma-moment inequality inputs
};

// E[H_a conj H_b] = delta_ab a!b! for all multi-indices of degree <= max_degree, n <= max_vars.
SuiteResult hermite_orthonormality_suite(unsigned max_degree = 4, std::size_t max_vars = 3);
// L H = -(p+q) H on both routes for degree <= max_degree, n <= max_vars.
SuiteResult l_eigen_suite(unsigned max_degree = 6, std::size_t max_vars = 2);
SuiteResult gamma_routes_suite(std::uint64_t seed, std::size_t pairs);
// E[Gamma(F, G)] = -E[F L conj(G)].
SuiteResult integration_by_parts_suite(std::uint64_t seed, std::size_t pairs);
SuiteResult diffusion_suite(std::uint64_t seed, std::size_t count);
SuiteResult chain_rule_suite(std::uint64_t seed, std::size_t count);
SuiteResult thm3_suite(std::uint64_t seed, std::size_t count);
SuiteResult cor1_suite(std::uint64_t seed, std::size_t count);

std::vector<SuiteResult> run_identity_suite(const IdentitySuiteConfig& cfg);

nlohmann::json to_json(const SuiteResult& r);

// Stein battery for d = 1, Sigma = 1: semigroup integrals of Re z and |z|^2 - 1
// against Re z and (|z|^2 - 1)/2, Stein equation residuals, and Hessian bounds
// for Re z and exp(-|z|^2) at alpha in {0, 1/2, 1}.
struct SemigroupCheck {
  std::string field;
  cplx point{};
  cplx value{};
  cplx expected{};
  double error = 0.0;
  double tolerance = 0.0;
  bool passed() const { return error <= tolerance; }
};

struct SteinBattery {
  std::vector<SemigroupCheck> semigroup;
  std::vector<std::pair<std::string, SteinResidualReport>> residuals;
  std::vector<std::pair<std::string, HessianBoundReport>> hessian;

  bool semigroup_passed() const;
  bool residuals_passed() const;
  bool hessian_passed() const;
  bool passed() const { return semigroup_passed() && residuals_passed() && hessian_passed(); }
};

std::vector<std::vector<cplx>> stein_battery_points();
SteinBattery run_stein_battery(const SteinSolverConfig& cfg, double tolerance = 2e-2, double slack = 0.05);

nlohmann::json to_json(const SteinBattery& b);

}  // namespace cwchaos
