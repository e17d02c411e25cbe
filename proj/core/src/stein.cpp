#include "cwchaos/stein.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "cwchaos/poly_json.hpp"

namespace cwchaos {

void SteinSolverConfig::validate() const {
  if (!(s_max > 0.0)) throw std::invalid_argument("s_max must be positive");
  if (quadrature_nodes < 8) throw std::invalid_argument("at least 8 quadrature nodes are required");
  if (mc_samples < 2) throw std::invalid_argument("at least 2 Monte Carlo samples are required");
}

double stein_constant(const ComplexMatrix& sigma) {
  if (sigma.rows() == 0 || sigma.rows() != sigma.cols())
    throw std::invalid_argument("covariance must be square");
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if ((sigma - sigma.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("covariance is not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sigma, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  if (!(lmin > 0.0)) throw std::invalid_argument("covariance is singular or indefinite");
  return std::sqrt(lmax) / lmin;
}

QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
  if (n == 0) throw std::invalid_argument("quadrature needs at least one node");
  const double nd = static_cast<double>(n);
  // Returns {P_n(x), P_n'(x)} by the three-term recurrence.
  auto legendre = [&](double x) {
    double p0 = 1.0, p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double kd = static_cast<double>(k);
      const double pk = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
      p0 = p1;
      p1 = pk;
    }
    return std::pair{p1, nd * (x * p1 - p0) / (x * x - 1.0)};
  };
  QuadratureRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = mid - half * x;
    r.nodes[n - 1 - i] = mid + half * x;
    r.weights[i] = r.weights[n - 1 - i] = half * w;
  }
  return r;
}

SteinSolver::SteinSolver(FieldPtr h, GaussianSpec spec, SteinSolverConfig cfg)
    : h_(std::move(h)), spec_(std::move(spec)), cfg_(cfg) {
  cfg_.validate();
  if (!h_) throw std::invalid_argument("test function is null");
  if (h_->dim() != spec_.dim()) throw std::invalid_argument("test function dimension mismatch");
  if (!spec_.is_centered()) throw std::invalid_argument("the Stein solver needs mu = 0");
  rule_ = gauss_legendre(cfg_.quadrature_nodes, 0.0, cfg_.s_max);

  const std::size_t half = cfg_.mc_samples / 2;
  const SampleMatrix base = sample(spec_, half, derive_seed(cfg_.seed, 0x57e1), cfg_.threads);
  z_.resize(static_cast<Eigen::Index>(2 * half), base.cols());
  z_.topRows(base.rows()) = base;
  z_.bottomRows(base.rows()) = -base;

  const std::size_t d = spec_.dim();
  cplx acc = 0.0;
  for (Eigen::Index m = 0; m < z_.rows(); ++m) {
    const cplx v = h_->value(std::span<const cplx>(z_.row(m).data(), d));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::domain_error("test function is not finite on the sample");
    acc += v;
  }
  mean_h_ = acc / static_cast<double>(z_.rows());
}

cplx SteinSolver::mean_h() const {
  if (const CWPoly* p = h_->polynomial()) {
    std::vector<cplx> s(spec_.dim() * spec_.dim());
    for (std::size_t j = 0; j < spec_.dim(); ++j)
      for (std::size_t k = 0; k < spec_.dim(); ++k)
        s[j * spec_.dim() + k] = spec_.sigma()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
    return gaussian_expectation(*p, std::span<const cplx>(s));
  }
  return mean_h_;
}

Jet2 SteinSolver::semigroup_integral(std::span<const cplx> z) const {
  const std::size_t d = spec_.dim();
  if (z.size() != d) throw std::invalid_argument("point dimension mismatch");
  const std::size_t m = 2 * d;
  const std::size_t samples = static_cast<std::size_t>(z_.rows());

  // Per-block sums of value, a * grad and a^2 * hess of h(a z + b Z) over the
  // frozen sample, weighted by the quadrature; blocks merge in order.
  const std::size_t width = 1 + m + m * m;
  auto blocks = run_blocks<std::vector<cplx>>(samples, cfg_.threads, [&](std::size_t, std::size_t first, std::size_t count) {
    std::vector<cplx> acc(width, 0.0);
    std::vector<cplx> point(d);
    Jet2 jet(d, 0.0);
    for (std::size_t q = 0; q < rule_.nodes.size(); ++q) {
      const double s = rule_.nodes[q];
      const double a = std::exp(-s);
      const double b = std::sqrt(-std::expm1(-2.0 * s));
      const double w = rule_.weights[q];
      for (std::size_t r = first; r < first + count; ++r) {
        for (std::size_t j = 0; j < d; ++j)
          point[j] = a * z[j] + b * z_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
        h_->jet(point, jet);
        acc[0] += w * jet.value();
        for (std::size_t i = 0; i < m; ++i) acc[1 + i] += (w * a) * jet.grad(i);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t k = 0; k < m; ++k) acc[1 + m + i * m + k] += (w * a * a) * jet.hess(i, k);
      }
    }
    return acc;
  }, 4096);

  std::vector<cplx> total(width, 0.0);
  for (const auto& b : blocks)
    for (std::size_t i = 0; i < width; ++i) total[i] += b[i];
  const double inv = 1.0 / static_cast<double>(samples);
  double wsum = 0.0;
  for (double w : rule_.weights) wsum += w;

  Jet2 out(d, total[0] * inv - wsum * mean_h_);
  for (std::size_t i = 0; i < m; ++i) out.grad_ref(i) = total[1 + i] * inv;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k) out.hess_ref(i, k) = total[1 + m + i * m + k] * inv;
  return out;
}

Jet2 SteinSolver::solve(std::span<const cplx> z) const { return -semigroup_integral(z); }

Jet2 solve_stein(const FieldPtr& h, const GaussianSpec& spec, std::span<const cplx> z,
                 const SteinSolverConfig& cfg) {
  return SteinSolver(h, spec, cfg).solve(z);
}

cplx stein_equation_lhs(const Jet2& f, const ComplexMatrix& sigma, std::span<const cplx> z) {
  const std::size_t d = f.dim();
  if (z.size() != d || static_cast<std::size_t>(sigma.rows()) != d)
    throw std::invalid_argument("dimension mismatch");
  cplx v = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    for (std::size_t k = 0; k < d; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      v += f.dzbz(j, k) * sigma(kk, jj) + f.dzzb(j, k) * sigma(jj, kk);
    }
    v -= f.dz(j) * z[j] + f.dzbar(j) * std::conj(z[j]);
  }
  return v;
}

std::vector<SteinResidualReport> check_stein_residual(const SteinSolver& solver,
                                                      const std::vector<std::vector<cplx>>& points,
                                                      double tolerance) {
  std::vector<SteinResidualReport> out;
  const cplx eh = solver.mean_h();
  for (const auto& p : points) {
    const Jet2 u = solver.solve(p);
    SteinResidualReport r;
    r.point = p;
    r.lhs = stein_equation_lhs(u, solver.spec().sigma(), p);
    r.rhs = solver.field()->value(p) - eh;
    r.residual = std::abs(r.lhs - r.rhs);
    r.tolerance = tolerance;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SteinResidualReport> check_stein_residual(const FieldPtr& h, const GaussianSpec& spec,
                                                      const std::vector<std::vector<cplx>>& points,
                                                      const SteinSolverConfig& cfg, double tolerance) {
  return check_stein_residual(SteinSolver(h, spec, cfg), points, tolerance);
}

namespace {

double hs_block(const Jet2& u, std::size_t off_a, std::size_t off_b) {
  const std::size_t d = u.dim();
  double s = 0.0;
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < d; ++k) s += std::norm(u.hess(off_a + j, off_b + k));
  return std::sqrt(s);
}

}  // namespace

HessianBoundReport check_hessian_bounds(const SteinSolver& solver,
                                        const std::vector<std::vector<cplx>>& points, double alpha,
                                        double slack, std::optional<GradientSup> sup) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  HessianBoundReport r;
  r.alpha = alpha;
  r.slack = slack;
  r.c_sigma = stein_constant(solver.spec().sigma());
  const std::size_t d = solver.spec().dim();
  if (!sup) sup = solver.field()->gradient_sup();
  if (!sup) {
    GradientSup est;
    Jet2 jet(d, 0.0);
    auto visit = [&](std::span<const cplx> z) {
      solver.field()->jet(z, jet);
      for (std::size_t j = 0; j < d; ++j) {
        est.dz = std::max(est.dz, std::abs(jet.dz(j)));
        est.dzbar = std::max(est.dzbar, std::abs(jet.dzbar(j)));
      }
    };
    const auto& zs = solver.frozen_sample();
    for (Eigen::Index m = 0; m < zs.rows(); ++m) visit(std::span<const cplx>(zs.row(m).data(), d));
    for (const auto& p : points) visit(p);
    sup = est;
    r.sup_estimated = true;
  }
  r.sup = *sup;
  r.mixed_bound = r.c_sigma * (alpha * r.sup.dz + (1.0 - alpha) * r.sup.dzbar);
  r.zz_bound = r.c_sigma * r.sup.dz;
  r.zbzb_bound = r.c_sigma * r.sup.dzbar;

  const double grow = 1.0 + slack;
  const double floor = 1e-12;
  r.passed = true;
  for (const auto& p : points) {
    const Jet2 u = solver.solve(p);
    HessianBoundPoint hp;
    hp.point = p;
    hp.zzb = hs_block(u, 0, d);
    hp.zbz = hs_block(u, d, 0);
    hp.zz = hs_block(u, 0, 0);
    hp.zbzb = hs_block(u, d, d);
    r.passed = r.passed && hp.zzb <= grow * r.mixed_bound + floor &&
               hp.zbz <= grow * r.mixed_bound + floor && hp.zz <= grow * r.zz_bound + floor &&
               hp.zbzb <= grow * r.zbzb_bound + floor;
    r.points.push_back(std::move(hp));
  }
  return r;
}

nlohmann::json to_json(const SteinResidualReport& r) {
  return {{"point", complex_vector_to_json(r.point)},
          {"lhs", cplx_to_json(r.lhs)},
          {"rhs", cplx_to_json(r.rhs)},
          {"residual", r.residual},
          {"tolerance", r.tolerance},
          {"passed", r.passed()}};
}

nlohmann::json to_json(const HessianBoundReport& r) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : r.points)
    pts.push_back({{"point", complex_vector_to_json(p.point)},
                   {"hs_zzbar", p.zzb},
                   {"hs_zbarz", p.zbz},
                   {"hs_zz", p.zz},
                   {"hs_zbarzbar", p.zbzb}});
  return {{"alpha", r.alpha},
          {"c_sigma", r.c_sigma},
          {"sup_dz", r.sup.dz},
          {"sup_dzbar", r.sup.dzbar},
          {"sup_estimated", r.sup_estimated},
          {"slack", r.slack},
          {"mixed_bound", r.mixed_bound},
          {"zz_bound", r.zz_bound},
          {"zbarzbar_bound", r.zbzb_bound},
          {"points", pts},
          {"passed", r.passed}};
}

}  // namespace cwchaos
