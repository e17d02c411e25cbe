#pragma once

// The circularly symmetric complex normal law CN_d(mu, Sigma): density,
// characteristic function, sampling, and Monte Carlo checks of the Gaussian
// integration-by-parts and Stein identities.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cwchaos/cpoly.hpp"
#include "cwchaos/fields.hpp"
#include "cwchaos/rational.hpp"
#include "cwchaos/rng.hpp"

namespace cwchaos {

using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
// One sample per row.
using SampleMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

ComplexMatrix to_eigen(const RationalMatrix& m);

class GaussianSpec {
 public:
  GaussianSpec() = default;
  // Throws std::invalid_argument unless sigma is Hermitian (1e-12) and positive definite.
  GaussianSpec(ComplexVector mu, ComplexMatrix sigma);
  static GaussianSpec standard(std::size_t d);
  static GaussianSpec centered(ComplexMatrix sigma);

  std::size_t dim() const { return static_cast<std::size_t>(mu_.size()); }
  const ComplexVector& mu() const { return mu_; }
  const ComplexMatrix& sigma() const { return sigma_; }
  // Hermitian spectral square root A, A* A = Sigma.
  const ComplexMatrix& sqrt_factor() const { return sqrt_; }
  const ComplexMatrix& sigma_inverse() const { return inverse_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  double determinant() const;
  bool is_centered() const { return mu_.isZero(0.0); }

 private:
  ComplexVector mu_;
  ComplexMatrix sigma_;
  ComplexMatrix sqrt_;
  ComplexMatrix inverse_;
  Eigen::VectorXd eigenvalues_;
};

double density(const GaussianSpec& spec, std::span<const cplx> z);
// exp(i Re<mu, zeta> - <Sigma zeta, zeta> / 4) with <a, b> = sum a_j conj(b_j).
cplx char_fn(const GaussianSpec& spec, std::span<const cplx> zeta);

// Rows are mu + A Z_std; block b of kMcBlockSize rows uses stream (seed, b).
SampleMatrix sample(const GaussianSpec& spec, std::size_t count, std::uint64_t seed,
                    std::size_t threads = 0);

void write_samples_csv(std::ostream& out, const SampleMatrix& samples);
// Throws std::runtime_error on malformed input.
SampleMatrix read_samples_csv(std::istream& in);

// Monte Carlo estimate of E[lhs] - E[rhs], both evaluated on the same draws.
struct McIdentity {
  std::string name;
  cplx lhs{};
  cplx rhs{};
  cplx residual{};
  double se_re = 0.0;
  double se_im = 0.0;
  std::size_t samples = 0;
  // Exact values of both sides when the test function is a polynomial.
  std::optional<RationalComplex> exact_lhs;
  std::optional<RationalComplex> exact_rhs;

  // |residual| within k standard errors in each component (plus `floor`).
  bool within(double k, double floor = 1e-12) const;
  bool exact_agrees() const { return !exact_lhs || *exact_lhs == *exact_rhs; }
};

struct MomentCheck {
  std::string name;
  cplx estimate{};
  cplx target{};
  double se_re = 0.0;
  double se_im = 0.0;
  bool within(double k) const;
};

// Covariance, relation matrix entries and, for d = 1, E|Z|^4 against Sigma, 0 and 2 sigma^4.
std::vector<MomentCheck> sampler_moment_checks(const GaussianSpec& spec, std::size_t count,
                                               std::uint64_t seed, std::size_t threads = 0);

// Both identities of the Gaussian integration by parts for coordinate i (mu = 0):
//   E[Z_i phi] = sum_j E[Z_i conj Z_j] E[d phi/d zbar_j]
//   E[conj Z_i phi] = sum_j E[Z_j conj Z_i] E[d phi/d z_j]
std::vector<McIdentity> verify_ibp(const GaussianSpec& spec, const FieldPtr& phi, std::size_t i,
                                   std::size_t count, std::uint64_t seed, std::size_t threads = 0,
                                   const RationalMatrix* exact_sigma = nullptr);

// d = 1, standard law: E[df/dz] = E[conj(Z) f].
McIdentity verify_lemma1(const FieldPtr& f, std::size_t count, std::uint64_t seed,
                         std::size_t threads = 0);

// The Stein operator
//   sum_jk d2f/dzbar_j dz_k sigma_kj + d2f/dz_j dzbar_k sigma_jk - df/dz_j z_j - df/dzbar_j zbar_j
// has mean zero under CN_d(0, Sigma). Compared against 0.
McIdentity verify_stein_characterization(const GaussianSpec& spec, const FieldPtr& f,
                                         std::size_t count, std::uint64_t seed,
                                         std::size_t threads = 0,
                                         const RationalMatrix* exact_sigma = nullptr);

// The same operator applied symbolically.
CWPoly stein_operator(const CWPoly& f, const RationalMatrix& sigma);

}  // namespace cwchaos
