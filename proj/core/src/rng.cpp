#include "cwchaos/rng.hpp"

#include <cmath>

namespace cwchaos {

Engine make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Engine(seq);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  // splitmix64 finalizer over the combined words
  std::uint64_t x = seed ^ (tag * 0x9E3779B97F4A7C15ULL);
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

cplx standard_complex_normal(Engine& engine) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(engine);
  const double im = n(engine);
  return {re, im};
}

void fill_standard_complex_normal(Engine& engine, std::span<cplx> out) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  for (auto& z : out) {
    const double re = n(engine);
    const double im = n(engine);
    z = {re, im};
  }
}

void RunningStats::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void RunningStats::merge(const RunningStats& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
  const double delta = o.mean_ - mean_;
  const double n = na + nb;
  mean_ += delta * nb / n;
  m2_ += o.m2_ + delta * delta * na * nb / n;
  n_ += o.n_;
}

double RunningStats::std_error() const {
  return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

CovarianceStats::CovarianceStats(std::size_t k)
    : mean_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k))),
      m2_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k))) {}

void CovarianceStats::add(const Eigen::VectorXd& x) {
  ++n_;
  const Eigen::VectorXd delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_.noalias() += delta * (x - mean_).transpose();
}

void CovarianceStats::merge(const CovarianceStats& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const Eigen::VectorXd delta = o.mean_ - mean_;
  mean_ += delta * (nb / n);
  m2_ += o.m2_ + (delta * delta.transpose()) * (na * nb / n);
  n_ += o.n_;
}

Eigen::MatrixXd CovarianceStats::mean_covariance() const {
  if (n_ < 2) return Eigen::MatrixXd::Zero(m2_.rows(), m2_.cols());
  const double n = static_cast<double>(n_);
  return m2_ / ((n - 1.0) * n);
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace cwchaos
