#include "cwchaos/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cwchaos/rng.hpp"

namespace cwchaos {

TransportProblem::TransportProblem(SampleMatrix xs, SampleMatrix ys, std::size_t threads)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.rows() == 0) throw std::invalid_argument("empty sample");
  if (xs_.rows() != ys_.rows()) throw std::invalid_argument("samples have different sizes");
  if (xs_.cols() != ys_.cols()) throw std::invalid_argument("samples have different dimensions");
  const auto n = xs_.rows();
  cost_.resize(n, n);
  constexpr std::size_t rows_per_block = 64;
  run_blocks<int>(static_cast<std::size_t>(n), threads,
                  [&](std::size_t, std::size_t first, std::size_t count) {
                    for (std::size_t r = first; r < first + count; ++r) {
                      const auto i = static_cast<Eigen::Index>(r);
                      for (Eigen::Index j = 0; j < n; ++j) cost_(i, j) = (xs_.row(i) - ys_.row(j)).norm();
                    }
                    return 0;
                  },
                  rows_per_block);
}

std::string to_string(TransportMethod m) {
  return m == TransportMethod::exact_assignment ? "exact_assignment" : "sinkhorn";
}

TransportResult w1_exact(const TransportProblem& problem, std::size_t cap) {
  const std::size_t n = problem.size();
  if (n > cap) throw std::invalid_argument("sample size exceeds the exact assignment cap");
  const Eigen::MatrixXd& c = problem.cost();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  std::size_t iterations = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      ++iterations;
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = c(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  TransportResult r;
  r.method = TransportMethod::exact_assignment;
  r.iterations = iterations;
  r.assignment.resize(n);
  for (std::size_t j = 1; j <= n; ++j) r.assignment[p[j] - 1] = j - 1;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    total += c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r.assignment[i]));
  r.value = total / static_cast<double>(n);
  return r;
}

namespace {

double log_sum_exp(const Eigen::VectorXd& x) {
  const double m = x.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((x.array() - m).exp().sum());
}

}  // namespace

TransportResult w1_sinkhorn(const TransportProblem& problem, double eps, std::size_t max_iter, double tol) {
  if (!(eps > 0.0)) throw std::invalid_argument("Sinkhorn regularization must be positive");
  const auto n = static_cast<Eigen::Index>(problem.size());
  const Eigen::MatrixXd& c = problem.cost();
  const double log_w = -std::log(static_cast<double>(n));
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n), g = Eigen::VectorXd::Zero(n), buf(n);

  auto plan = [&](double e) {
    Eigen::MatrixXd P(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) P(i, j) = std::exp((f(i) + g(j) - c(i, j)) / e);
    return P;
  };

  TransportResult r;
  r.method = TransportMethod::sinkhorn;
  r.converged = false;
  double e = std::max(eps, c.maxCoeff());
  while (true) {
    bool stage_done = false;
    while (r.iterations < max_iter) {
      ++r.iterations;
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) buf(j) = (g(j) - c(i, j)) / e;
        f(i) = e * (log_w - log_sum_exp(buf));
      }
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) buf(i) = (f(i) - c(i, j)) / e;
        g(j) = e * (log_w - log_sum_exp(buf));
      }
      if (r.iterations % 10 == 0 || n == 1) {
        const Eigen::VectorXd rows = plan(e).rowwise().sum();
        if ((rows.array() - std::exp(log_w)).abs().sum() < tol) {
          stage_done = true;
          break;
        }
      }
    }
    if (e <= eps) {
      r.converged = stage_done;
      break;
    }
    if (!stage_done) break;
    e = std::max(eps, 0.5 * e);
  }

  Eigen::MatrixXd P = plan(e);
  const double w = std::exp(log_w);
  const Eigen::VectorXd rows = P.rowwise().sum();
  for (Eigen::Index i = 0; i < n; ++i)
    if (rows(i) > w) P.row(i) *= w / rows(i);
  const Eigen::RowVectorXd cols = P.colwise().sum();
  for (Eigen::Index j = 0; j < n; ++j)
    if (cols(j) > w) P.col(j) *= w / cols(j);
  const Eigen::VectorXd err_r = (w - P.rowwise().sum().array()).matrix();
  const Eigen::RowVectorXd err_c = (w - P.colwise().sum().array()).matrix();
  const double mass = err_r.sum();
  if (mass > 0.0) P += err_r * err_c / mass;

  double value = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) value += P(i, j) * c(i, j);
  double dual = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) dual += w * (c.col(j) - f).minCoeff();
  dual += w * f.sum();
  r.value = value;
  r.dual_gap = std::max(0.0, value - dual);
  return r;
}

SampleSource gaussian_source(const GaussianSpec& spec) {
  return [spec](std::size_t count, std::uint64_t seed) { return sample(spec, count, seed, 1); };
}

SampleSource chaos_source(const ChaoticVector& F) {
  F.validate_centered();
  std::vector<CompiledPoly> compiled;
  for (const auto& comp : F.components) compiled.emplace_back(comp.poly());
  const double scale = std::sqrt(F.scale_sq.get_d());
  const std::size_t vars = F.num_vars();
  return [compiled = std::move(compiled), scale, vars](std::size_t count, std::uint64_t seed) {
    const SampleMatrix z = sample(GaussianSpec::standard(vars), count, seed, 1);
    SampleMatrix out(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(compiled.size()));
    std::vector<cplx> row(vars);
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      for (std::size_t k = 0; k < vars; ++k) row[k] = z(i, static_cast<Eigen::Index>(k));
      for (std::size_t j = 0; j < compiled.size(); ++j)
        out(i, static_cast<Eigen::Index>(j)) = scale * compiled[j](row);
    }
    return out;
  };
}

DwEstimate estimate_dw(const SampleSource& source_a, const SampleSource& source_b, std::size_t n,
                       std::size_t repeats, std::uint64_t seed, std::size_t threads, double sinkhorn_eps) {
  if (n == 0 || repeats == 0) throw std::invalid_argument("sample size and repeats must be positive");
  const bool exact = n <= kExactTransportCap;
  auto values = run_blocks<double>(repeats, threads,
                                   [&](std::size_t r, std::size_t, std::size_t) {
                                     const std::uint64_t s = derive_seed(seed, r);
                                     TransportProblem problem(source_a(n, derive_seed(s, 1)),
                                                              source_b(n, derive_seed(s, 2)), 1);
                                     return exact ? w1_exact(problem).value
                                                  : w1_sinkhorn(problem, sinkhorn_eps).value;
                                   },
                                   1);
  DwEstimate est;
  est.n = n;
  est.method = exact ? TransportMethod::exact_assignment : TransportMethod::sinkhorn;
  RunningStats stats;
  for (double v : values) stats.add(v);
  est.mean = stats.mean();
  est.std_error = repeats > 1 ? stats.std_error() : 0.0;
  est.values = std::move(values);
  return est;
}

DwEstimate estimate_dw(const SampleSource& source_f, const GaussianSpec& spec_z, std::size_t n,
                       std::size_t repeats, std::uint64_t seed, std::size_t threads, double sinkhorn_eps) {
  return estimate_dw(source_f, gaussian_source(spec_z), n, repeats, seed, threads, sinkhorn_eps);
}

nlohmann::json to_json(const TransportResult& r) {
  nlohmann::json j{{"value", r.value},
                   {"method", to_string(r.method)},
                   {"iterations", r.iterations},
                   {"converged", r.converged}};
  if (r.method == TransportMethod::sinkhorn) j["dual_gap"] = r.dual_gap;
  return j;
}

nlohmann::json to_json(const DwEstimate& e) {
  return {{"mean", e.mean},
          {"std_error", e.std_error},
          {"n", e.n},
          {"repeats", e.values.size()},
          {"method", to_string(e.method)},
          {"values", e.values}};
}

}  // namespace cwchaos
