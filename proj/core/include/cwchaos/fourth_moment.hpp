#pragma once

// Fourth-moment bounds on the Wasserstein distance between a chaotic vector and
// CN_d(0, Sigma): the Gamma-integral bound, the moment bound
//   c(Sigma) sqrt(Psi1 + Psi2 + Psi3),
// their exact and Monte Carlo evaluation, and convergence diagnostics along
// sequences.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "cwchaos/cgauss.hpp"
#include "cwchaos/ou.hpp"
#include "cwchaos/rational.hpp"

namespace cwchaos {

inline constexpr double kPsi2Clip = 1e-12;

// Exact moments of F = sqrt(scale_sq) (P_1, ..., P_d), scale included.
struct ExactMoments {
  std::size_t d = 0;
  std::vector<RationalComplex> second;  // int F_j conj(F_k), row-major
  std::vector<Rational> abs4;           // int |F_j F_k|^2, row-major
  std::vector<Rational> gram_sq;        // int Gamma(F_k, -L^-1 F_k)^2, empty unless requested

  const RationalComplex& second_at(std::size_t j, std::size_t k) const { return second[j * d + k]; }
  const Rational& abs4_at(std::size_t j, std::size_t k) const { return abs4[j * d + k]; }
};

ExactMoments exact_moments(const ChaoticVector& F, bool with_gram = false);

// Layout of the Monte Carlo moment vector: Re and Im of int F_j conj(F_k) for
// j < k, then int |F_j|^2, then int |F_j F_k|^2 for j <= k.
struct McMomentState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // covariance of the sample mean
  std::size_t samples = 0;
};

struct MomentSummary {
  std::size_t d = 0;
  ComplexMatrix second_moments;
  Eigen::MatrixXd abs4;
  std::optional<Eigen::VectorXd> gram_sq;
  std::optional<McMomentState> mc;
};

MomentSummary to_summary(const ExactMoments& m);
MomentSummary mc_moments(const ChaoticVector& F, std::size_t count, std::uint64_t seed,
                         std::size_t threads = 0);
// Inverse of the Monte Carlo vector layout.
MomentSummary summary_from_vector(std::size_t d, const Eigen::VectorXd& v);
Eigen::VectorXd summary_to_vector(const MomentSummary& m);

// Psi terms in exact arithmetic; Psi2 is the sum of square roots of the radicands.
struct ExactPsi {
  Rational psi1;
  Rational psi3;
  std::vector<Rational> psi2_radicands;  // row-major (j, k)
  double psi2() const;
};

// Throws std::domain_error for a negative radicand.
ExactPsi exact_psi(const ExactMoments& m, const RationalMatrix& sigma);

struct BoundReport {
  std::string n_label;
  double psi1 = 0.0;
  double psi2 = 0.0;
  double psi3 = 0.0;
  double thm4_bound = 0.0;
  std::optional<double> thm4_se;
  std::optional<double> thm1_bound;
  double c_sigma = 0.0;
  std::optional<double> empirical_w1;
  std::optional<double> w1_se;
  std::optional<ExactPsi> exact;
  std::optional<Rational> thm1_integral;  // the Gamma integral under the square root
};

// From moments alone. Radicands in (-clip, 0) clamp to 0; below -clip throws
// std::domain_error. For Monte Carlo summaries the standard error follows from
// the delta method with a central-difference gradient.
BoundReport thm4_bound(const MomentSummary& m, const ComplexMatrix& sigma, double clip = kPsi2Clip);
BoundReport thm4_bound_exact(const ExactMoments& m, const RationalMatrix& sigma);

struct Thm1Integrals {
  Rational conj_term;      // sum_jk int |Gamma(conj F_j, -L^-1 F_k)|^2
  Rational centered_term;  // sum_jk int |Gamma(F_j, -L^-1 F_k) - sigma_jk|^2
  Rational total() const { return conj_term + centered_term; }
};

// Requires centered components and a d x d sigma.
Thm1Integrals thm1_integrals(const ChaoticVector& F, const RationalMatrix& sigma);
// Exact route: thm1 bound plus the moment bound from exact moments.
BoundReport thm1_bound_exact(const ChaoticVector& F, const RationalMatrix& sigma);

// Rigorous comparison of a rational x with psi1 + psi2 + psi3.
enum class Comparison { less_or_equal, greater, undetermined };
Comparison compare_with_psi(const Rational& x, const ExactPsi& psi, unsigned bits = 128);

struct Cor3Point {
  Eigen::MatrixXd second_gap;  // |int F_j conj F_k - sigma_jk|
  Eigen::MatrixXd fourth_gap;  // |int |F_j F_k|^2 - (sigma_jj sigma_kk + |sigma_jk|^2)|
  double max_second_gap = 0.0;
  double max_fourth_gap = 0.0;
};

struct Cor3Verdict {
  std::vector<Cor3Point> points;
  double threshold = 0.5;
  bool monotone = false;
  bool below_threshold = false;
  bool converging = false;
};

// Converging iff every gap entry is non-increasing along the sequence and the
// final maximal gaps are at most `threshold`. Needs at least two points.
Cor3Verdict cor3_diagnostic(const std::vector<MomentSummary>& sequence, const ComplexMatrix& sigma,
                            double threshold = 0.5);

enum class JointVerdict { converging, not_converging, undetermined };
std::string to_string(JointVerdict v);

struct PeccatiTudorPoint {
  std::vector<double> second_gap;              // per component
  std::vector<double> fourth_gap;              // per component, |int |F_j|^4 - 2 sigma_jj^2|
  std::vector<std::optional<Rational>> hyp2;   // set when F_j shares its eigenvalue with another component
};

struct PeccatiTudorReport {
  std::vector<PeccatiTudorPoint> points;
  std::vector<bool> marginal_converging;
  bool covariance_converging = false;
  bool hypothesis2 = false;
  JointVerdict joint = JointVerdict::undetermined;
};

PeccatiTudorReport peccati_tudor_diagnostic(const std::vector<ChaoticVector>& sequence,
                                            const RationalMatrix& sigma, double threshold = 0.5);

nlohmann::json to_json(const BoundReport& r);
nlohmann::json to_json(const MomentSummary& m);
nlohmann::json to_json(const Cor3Verdict& v);
nlohmann::json to_json(const PeccatiTudorReport& r);

// CSV schema n,psi1,psi2,psi3,thm4_bound,thm1_bound,empirical_w1,w1_se; absent values are empty.
void write_bound_csv_header(std::ostream& out);
void write_bound_csv_row(std::ostream& out, const BoundReport& r);

// Formats a double with %.17g.
std::string format_double(double v);

}  // namespace cwchaos
