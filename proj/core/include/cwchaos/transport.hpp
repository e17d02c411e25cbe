#pragma once

// Empirical Wasserstein-1 distance between equal-size samples in C^d with the
// Euclidean ground cost on R^{2d}.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "cwchaos/cgauss.hpp"
#include "cwchaos/ou.hpp"

namespace cwchaos {

inline constexpr std::size_t kExactTransportCap = 1024;

class TransportProblem {
 public:
  // Throws std::invalid_argument on a size or dimension mismatch or empty samples.
  TransportProblem(SampleMatrix xs, SampleMatrix ys, std::size_t threads = 0);

  std::size_t size() const { return static_cast<std::size_t>(xs_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(xs_.cols()); }
  const SampleMatrix& xs() const { return xs_; }
  const SampleMatrix& ys() const { return ys_; }
  // cost(i, j) = |x_i - y_j|
  const Eigen::MatrixXd& cost() const { return cost_; }

 private:
  SampleMatrix xs_;
  SampleMatrix ys_;
  Eigen::MatrixXd cost_;
};

enum class TransportMethod { exact_assignment, sinkhorn };
std::string to_string(TransportMethod m);

struct TransportResult {
  double value = 0.0;
  TransportMethod method = TransportMethod::exact_assignment;
  std::size_t iterations = 0;
  double dual_gap = 0.0;  // sinkhorn only
  bool converged = true;
  std::vector<std::size_t> assignment;  // exact only: row i is matched to column assignment[i]
};

// Shortest augmenting path assignment, O(n^3). The value is the mean matched
// cost summed in row order. Throws std::invalid_argument if n > cap.
TransportResult w1_exact(const TransportProblem& problem, std::size_t cap = kExactTransportCap);

// Log-domain Sinkhorn with eps-scaling. The final plan is rounded onto the
// uniform marginals, so value >= exact; dual_gap = value - (a feasible dual
// objective) bounds value - exact. Each stage stops once the L1 error of the
// row marginals is below tol; non-convergence sets converged = false.
TransportResult w1_sinkhorn(const TransportProblem& problem, double eps, std::size_t max_iter = 100000,
                            double tol = 1e-4);

// Draws `count` rows from a source with the given seed.
using SampleSource = std::function<SampleMatrix(std::size_t count, std::uint64_t seed)>;

SampleSource gaussian_source(const GaussianSpec& spec);
// Rows (F_1(Z), ..., F_d(Z)) for standard Z in C^{num_vars}.
SampleSource chaos_source(const ChaoticVector& F);

struct DwEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  std::vector<double> values;
  TransportMethod method = TransportMethod::exact_assignment;
};

// Independent paired-sample W1 estimates. Repeat r draws F from
// derive_seed(derive_seed(seed, r), 1) and Z from derive_seed(derive_seed(seed, r), 2).
// The estimate carries the O(n^{-1/(2d)}) empirical-measure bias; it is
// reported, not corrected. Above the exact cap the Sinkhorn solver is used
// with eps = sinkhorn_eps.
DwEstimate estimate_dw(const SampleSource& source_f, const GaussianSpec& spec_z, std::size_t n,
                       std::size_t repeats, std::uint64_t seed, std::size_t threads = 0,
                       double sinkhorn_eps = 1e-2);
// Same, with both samples taken from given sources.
DwEstimate estimate_dw(const SampleSource& source_a, const SampleSource& source_b, std::size_t n,
                       std::size_t repeats, std::uint64_t seed, std::size_t threads = 0,
                       double sinkhorn_eps = 1e-2);

nlohmann::json to_json(const TransportResult& r);
nlohmann::json to_json(const DwEstimate& e);

}  // namespace cwchaos
