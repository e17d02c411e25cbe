#pragma once

// Batch experiments along a chaotic sequence F_n: exact and Monte Carlo
// fourth-moment bounds, empirical W1 distances and invariant checks, written
// as deterministic CSV and JSON.
//
// Config schema (JSON):
//   name            string
//   generator       "sum_of_squares" | "custom_polynomial" | "gaussian_control"
//   d               output dimension
//   n_grid          strictly increasing positive integers
//   target_sigma    d x d Hermitian matrix (rational entries, see poly_json.hpp)
//   polynomials     custom_polynomial only: d polynomials
//   scale_sq        custom_polynomial only, optional rational (default 1)
//   exact           bool, default true
//   mc_samples      0 disables the Monte Carlo route
//   w1_sample_size  0 disables the empirical distance
//   w1_repeats      default 8
//   seed            required
//   output_dir      default "."
//
// Sequences: sum_of_squares uses F_n,k = n^{-1/2} sum_j z_{kn+j}^2 over d*n
// variables; gaussian_control uses n^{-1/2} sum_m B z^{(m)} over d*n variables
// with B B* = target_sigma; custom_polynomial ignores n.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cwchaos/fourth_moment.hpp"
#include "cwchaos/ou.hpp"
#include "cwchaos/rational.hpp"
#include "cwchaos/transport.hpp"

namespace cwchaos {

inline constexpr int kSchemaVersion = 1;

std::string library_version();

// Raised for malformed configs and inputs the generators cannot represent.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Generator { sum_of_squares, custom_polynomial, gaussian_control };
std::string to_string(Generator g);

struct ExperimentConfig {
  std::string name;
  Generator generator = Generator::sum_of_squares;
  std::size_t d = 1;
  std::vector<std::size_t> n_grid;
  RationalMatrix target_sigma;
  std::vector<CWPoly> polynomials;
  Rational scale_sq{1};
  bool exact = true;
  std::size_t mc_samples = 0;
  std::size_t w1_sample_size = 0;
  std::size_t w1_repeats = 8;
  std::uint64_t seed = 0;
  std::string output_dir = ".";

  // Throws ValidationError.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
};

// 64-bit FNV-1a of the compact JSON serialization, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

// Sequence members.
ChaoticVector sum_of_squares(std::size_t n, std::size_t d = 1);
// Throws ValidationError unless sigma = L D L* has D_k / D_1 perfect rational squares.
ChaoticVector gaussian_control(const RationalMatrix& sigma, std::size_t n = 1);
ChaoticVector build_sequence_member(const ExperimentConfig& cfg, std::size_t n);

struct InvariantCheck {
  std::string name;
  std::size_t n = 0;
  bool passed = false;
  std::string detail;
};

struct ExperimentPoint {
  std::size_t n = 0;
  std::size_t num_vars = 0;
  BoundReport report;
  std::optional<MomentSummary> exact_moments;
  std::optional<MomentSummary> mc_moments;
  std::optional<BoundReport> mc_report;
  std::string mc_note;
  std::optional<DwEstimate> w1;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ExperimentPoint> points;
  std::vector<InvariantCheck> invariants;
  std::optional<Cor3Verdict> cor3;
  std::optional<PeccatiTudorReport> peccati_tudor;

  bool passed() const;
  nlohmann::json to_json() const;
  std::string csv() const;
};

// Points run on a worker pool; results are assembled in n order and do not
// depend on `threads`.
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t threads = 0);

// Writes <dir>/<name>.csv and <dir>/<name>.json; returns the two paths.
std::vector<std::string> write_experiment_outputs(const ExperimentResult& result, const std::string& dir);

}  // namespace cwchaos
