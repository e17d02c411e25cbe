#pragma once

// Seeded random streams and deterministic block-parallel Monte Carlo reduction.
//
// Every Monte Carlo loop is cut into fixed-size blocks; block b draws from the
// stream (seed, b) and per-block partial results are merged in block order, so
// results depend on the seed only and never on the thread count.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace cwchaos {

using Engine = std::mt19937_64;
using cplx = std::complex<double>;

inline constexpr std::size_t kMcBlockSize = 1 << 16;

Engine make_engine(std::uint64_t seed, std::uint64_t stream);

// Seed for an independent sub-computation identified by `tag`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

// Real and imaginary parts iid N(0, 1/2), so E|Z|^2 = 1 and E Z^2 = 0.
cplx standard_complex_normal(Engine& engine);
void fill_standard_complex_normal(Engine& engine, std::span<cplx> out);

// Running mean and variance, merged with Chan's pairwise update.
class RunningStats {
 public:
  void add(double x);
  void merge(const RunningStats& o);

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double std_error() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Mean vector and sample covariance of a vector-valued estimator.
class CovarianceStats {
 public:
  CovarianceStats() = default;
  explicit CovarianceStats(std::size_t k);

  void add(const Eigen::VectorXd& x);
  void merge(const CovarianceStats& o);

  std::size_t count() const { return n_; }
  std::size_t size() const { return static_cast<std::size_t>(mean_.size()); }
  const Eigen::VectorXd& mean() const { return mean_; }
  // Covariance of the sample mean (sample covariance over n).
  Eigen::MatrixXd mean_covariance() const;

 private:
  std::size_t n_ = 0;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd m2_;
};

std::size_t resolve_threads(std::size_t requested);

// Runs fn(block_index, first, count) for ceil(total / block) blocks on up to
// `threads` workers and returns the per-block results in block order.
template <class Result, class Fn>
std::vector<Result> run_blocks(std::size_t total, std::size_t threads, Fn fn,
                               std::size_t block = kMcBlockSize) {
  const std::size_t nblocks = (total + block - 1) / block;
  std::vector<Result> results(nblocks);
  const std::size_t workers = std::min(resolve_threads(threads), std::max<std::size_t>(nblocks, 1));
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&](std::size_t w) {
    for (std::size_t b = w; b < nblocks; b += workers) {
      try {
        const std::size_t first = b * block;
        results[b] = fn(b, first, std::min(block, total - first));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace cwchaos
