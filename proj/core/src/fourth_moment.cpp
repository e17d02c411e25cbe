#include "cwchaos/fourth_moment.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "cwchaos/poly_json.hpp"
#include "cwchaos/stein.hpp"

namespace cwchaos {

namespace {

std::vector<CWPoly> component_polys(const ChaoticVector& F) {
  std::vector<CWPoly> out;
  for (const auto& c : F.components) out.push_back(c.poly());
  return out;
}

void require_sigma_dim(const RationalMatrix& sigma, std::size_t d) {
  if (sigma.dim() != d) throw std::invalid_argument("target covariance dimension mismatch");
  if (!sigma.is_hermitian()) throw std::invalid_argument("target covariance is not Hermitian");
}

Rational real_checked(const RationalComplex& v, const char* what) {
  if (!v.is_real()) throw std::logic_error(std::string(what) + " is not real");
  return v.re();
}

std::size_t mc_width(std::size_t d) { return d * (d - 1) + d + d * (d + 1) / 2; }

}  // namespace

ExactMoments exact_moments(const ChaoticVector& F, bool with_gram) {
  F.validate_centered();
  const std::size_t d = F.dim();
  const auto P = component_polys(F);
  const Rational& w = F.scale_sq;
  const Rational w2 = w * w;
  ExactMoments m;
  m.d = d;
  m.second.resize(d * d);
  m.abs4.resize(d * d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k)
      m.second[j * d + k] = inner_product(P[j], P[k]) * RationalComplex(w);
    for (std::size_t k = j; k < d; ++k) {
      const CWPoly prod = P[j] * P[k];
      m.abs4[j * d + k] = m.abs4[k * d + j] = real_checked(inner_product(prod, prod), "int |F_j F_k|^2") * w2;
    }
  }
  if (with_gram) {
    for (std::size_t k = 0; k < d; ++k) {
      const CWPoly g = ou::gamma(P[k], -ou::apply_L_inverse(P[k]));
      m.gram_sq.push_back(real_checked(expectation_of_product(g, g), "int Gamma^2") * w2);
    }
  }
  return m;
}

MomentSummary to_summary(const ExactMoments& m) {
  const auto d = static_cast<Eigen::Index>(m.d);
  MomentSummary s;
  s.d = m.d;
  s.second_moments.resize(d, d);
  s.abs4.resize(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = 0; k < d; ++k) {
      s.second_moments(j, k) = m.second_at(static_cast<std::size_t>(j), static_cast<std::size_t>(k)).to_complex();
      s.abs4(j, k) = m.abs4_at(static_cast<std::size_t>(j), static_cast<std::size_t>(k)).get_d();
    }
  if (!m.gram_sq.empty()) {
    Eigen::VectorXd g(d);
    for (Eigen::Index k = 0; k < d; ++k) g(k) = m.gram_sq[static_cast<std::size_t>(k)].get_d();
    s.gram_sq = g;
  }
  return s;
}

MomentSummary summary_from_vector(std::size_t d, const Eigen::VectorXd& v) {
  if (static_cast<std::size_t>(v.size()) != mc_width(d)) throw std::invalid_argument("moment vector has wrong length");
  const auto n = static_cast<Eigen::Index>(d);
  MomentSummary s;
  s.d = d;
  s.second_moments = ComplexMatrix::Zero(n, n);
  s.abs4 = Eigen::MatrixXd::Zero(n, n);
  Eigen::Index at = 0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = j + 1; k < n; ++k) {
      s.second_moments(j, k) = {v(at), v(at + 1)};
      s.second_moments(k, j) = std::conj(s.second_moments(j, k));
      at += 2;
    }
  for (Eigen::Index j = 0; j < n; ++j) s.second_moments(j, j) = v(at++);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = j; k < n; ++k) {
      s.abs4(j, k) = s.abs4(k, j) = v(at++);
    }
  return s;
}

Eigen::VectorXd summary_to_vector(const MomentSummary& m) {
  const auto n = static_cast<Eigen::Index>(m.d);
  Eigen::VectorXd v(static_cast<Eigen::Index>(mc_width(m.d)));
  Eigen::Index at = 0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = j + 1; k < n; ++k) {
      v(at++) = m.second_moments(j, k).real();
      v(at++) = m.second_moments(j, k).imag();
    }
  for (Eigen::Index j = 0; j < n; ++j) v(at++) = m.second_moments(j, j).real();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = j; k < n; ++k) v(at++) = m.abs4(j, k);
  return v;
}

MomentSummary mc_moments(const ChaoticVector& F, std::size_t count, std::uint64_t seed,
                         std::size_t threads) {
  F.validate_centered();
  if (count < 2) throw std::invalid_argument("at least 2 Monte Carlo samples are required");
  const std::size_t d = F.dim();
  const std::size_t n = F.num_vars();
  std::vector<CompiledPoly> compiled;
  for (const auto& c : F.components) compiled.emplace_back(c.poly());
  const double scale = std::sqrt(F.scale_sq.get_d());
  const std::size_t width = mc_width(d);

  auto blocks = run_blocks<CovarianceStats>(count, threads, [&](std::size_t b, std::size_t, std::size_t rows) {
    Engine engine = make_engine(seed, b);
    std::vector<cplx> z(n), f(d);
    Eigen::VectorXd x(static_cast<Eigen::Index>(width));
    CovarianceStats stats(width);
    for (std::size_t r = 0; r < rows; ++r) {
      fill_standard_complex_normal(engine, z);
      for (std::size_t j = 0; j < d; ++j) f[j] = scale * compiled[j](z);
      Eigen::Index at = 0;
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = j + 1; k < d; ++k) {
          const cplx v = f[j] * std::conj(f[k]);
          x(at++) = v.real();
          x(at++) = v.imag();
        }
      for (std::size_t j = 0; j < d; ++j) x(at++) = std::norm(f[j]);
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = j; k < d; ++k) x(at++) = std::norm(f[j] * f[k]);
      stats.add(x);
    }
    return stats;
  });
  CovarianceStats total(width);
  for (const auto& b : blocks) total.merge(b);
  MomentSummary s = summary_from_vector(d, total.mean());
  s.mc = McMomentState{total.mean(), total.mean_covariance(), count};
  return s;
}

double ExactPsi::psi2() const {
  double s = 0.0;
  for (const auto& r : psi2_radicands) s += std::sqrt(r.get_d());
  return s;
}

ExactPsi exact_psi(const ExactMoments& m, const RationalMatrix& sigma) {
  require_sigma_dim(sigma, m.d);
  const std::size_t d = m.d;
  ExactPsi p;
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < d; ++k) {
      p.psi1 += (m.second_at(j, k) - sigma(j, k)).norm();
      const Rational abs2k = m.second_at(k, k).re();
      Rational radicand = m.abs4_at(j, j) * (m.abs4_at(k, k) / 2 - abs2k * abs2k);
      if (sgn(radicand) < 0) throw std::domain_error("negative Psi2 radicand on an exact input");
      p.psi2_radicands.push_back(std::move(radicand));
      p.psi3 += m.abs4_at(j, k) - m.second_at(j, j).re() * abs2k - m.second_at(j, k).norm();
    }
  return p;
}

namespace {

struct PsiValues {
  double psi1 = 0.0, psi2 = 0.0, psi3 = 0.0;
};

PsiValues psi_from_summary(const MomentSummary& m, const ComplexMatrix& sigma, double clip, bool strict) {
  const auto d = static_cast<Eigen::Index>(m.d);
  PsiValues p;
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = 0; k < d; ++k) {
      p.psi1 += std::norm(m.second_moments(j, k) - sigma(j, k));
      const double abs2k = m.second_moments(k, k).real();
      double radicand = m.abs4(j, j) * (0.5 * m.abs4(k, k) - abs2k * abs2k);
      if (radicand < 0.0) {
        if (strict && radicand <= -clip) throw std::domain_error("Psi2 radicand below -clip");
        radicand = 0.0;
      }
      p.psi2 += std::sqrt(radicand);
      p.psi3 += m.abs4(j, k) - m.second_moments(j, j).real() * abs2k - std::norm(m.second_moments(j, k));
    }
  return p;
}

}  // namespace

BoundReport thm4_bound(const MomentSummary& m, const ComplexMatrix& sigma, double clip) {
  if (static_cast<std::size_t>(sigma.rows()) != m.d) throw std::invalid_argument("target covariance dimension mismatch");
  BoundReport r;
  r.c_sigma = stein_constant(sigma);
  const PsiValues p = psi_from_summary(m, sigma, clip, true);
  r.psi1 = p.psi1;
  r.psi2 = p.psi2;
  r.psi3 = p.psi3;
  r.thm4_bound = r.c_sigma * std::sqrt(std::max(0.0, p.psi1 + p.psi2 + p.psi3));
  if (m.mc) {
    const Eigen::VectorXd& v = m.mc->mean;
    auto f = [&](const Eigen::VectorXd& x) {
      const PsiValues q = psi_from_summary(summary_from_vector(m.d, x), sigma, clip, false);
      return r.c_sigma * std::sqrt(std::max(0.0, q.psi1 + q.psi2 + q.psi3));
    };
    Eigen::VectorXd grad(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(v(i)));
      Eigen::VectorXd up = v, down = v;
      up(i) += h;
      down(i) -= h;
      grad(i) = (f(up) - f(down)) / (2.0 * h);
    }
    r.thm4_se = std::sqrt(std::max(0.0, grad.dot(m.mc->covariance * grad)));
  }
  return r;
}

BoundReport thm4_bound_exact(const ExactMoments& m, const RationalMatrix& sigma) {
  const ExactPsi p = exact_psi(m, sigma);
  BoundReport r;
  r.c_sigma = stein_constant(to_eigen(sigma));
  r.psi1 = p.psi1.get_d();
  r.psi2 = p.psi2();
  r.psi3 = p.psi3.get_d();
  r.thm4_bound = r.c_sigma * std::sqrt(r.psi1 + r.psi2 + r.psi3);
  r.exact = p;
  return r;
}

Thm1Integrals thm1_integrals(const ChaoticVector& F, const RationalMatrix& sigma) {
  F.validate_centered();
  const std::size_t d = F.dim();
  require_sigma_dim(sigma, d);
  const std::size_t n = F.num_vars();
  const auto P = component_polys(F);
  const RationalComplex w(F.scale_sq);
  std::vector<CWPoly> Q;
  for (const auto& p : P) Q.push_back(-ou::apply_L_inverse(p));

  Thm1Integrals out;
  for (std::size_t j = 0; j < d; ++j) {
    const CWPoly pbar = P[j].conj();
    for (std::size_t k = 0; k < d; ++k) {
      const CWPoly gc = ou::gamma(pbar, Q[k]) * w;
      out.conj_term += real_checked(inner_product(gc, gc), "int |Gamma(conj F, -L^-1 F)|^2");
      const CWPoly g = ou::gamma(P[j], Q[k]) * w - CWPoly::constant(n, sigma(j, k));
      out.centered_term += real_checked(inner_product(g, g), "int |Gamma(F, -L^-1 F) - sigma|^2");
    }
  }
  return out;
}

BoundReport thm1_bound_exact(const ChaoticVector& F, const RationalMatrix& sigma) {
  const Thm1Integrals t = thm1_integrals(F, sigma);
  BoundReport r = thm4_bound_exact(exact_moments(F), sigma);
  r.thm1_integral = t.total();
  r.thm1_bound = 2.0 * r.c_sigma * std::sqrt(t.total().get_d());
  return r;
}

Comparison compare_with_psi(const Rational& x, const ExactPsi& psi, unsigned bits) {
  for (unsigned b = bits; b <= 8 * bits; b *= 2) {
    Rational lo = psi.psi1 + psi.psi3, hi = lo;
    for (const auto& r : psi.psi2_radicands) {
      Rational root;
      if (exact_sqrt(r, root)) {
        lo += root;
        hi += root;
        continue;
      }
      Rational l, h;
      sqrt_bounds(r, b, l, h);
      lo += l;
      hi += h;
    }
    if (x <= lo) return Comparison::less_or_equal;
    if (x > hi) return Comparison::greater;
  }
  return Comparison::undetermined;
}

namespace {

bool non_increasing(double prev, double next) { return next <= prev + 1e-12 * std::max(1.0, prev); }

}  // namespace

Cor3Verdict cor3_diagnostic(const std::vector<MomentSummary>& sequence, const ComplexMatrix& sigma,
                            double threshold) {
  if (sequence.size() < 2) throw std::invalid_argument("the diagnostic needs at least two sequence points");
  const auto d = sigma.rows();
  Cor3Verdict v;
  v.threshold = threshold;
  for (const auto& m : sequence) {
    if (static_cast<Eigen::Index>(m.d) != d) throw std::invalid_argument("sequence dimension mismatch");
    Cor3Point p;
    p.second_gap.resize(d, d);
    p.fourth_gap.resize(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index k = 0; k < d; ++k) {
        p.second_gap(j, k) = std::abs(m.second_moments(j, k) - sigma(j, k));
        const double target = sigma(j, j).real() * sigma(k, k).real() + std::norm(sigma(j, k));
        p.fourth_gap(j, k) = std::abs(m.abs4(j, k) - target);
      }
    p.max_second_gap = p.second_gap.maxCoeff();
    p.max_fourth_gap = p.fourth_gap.maxCoeff();
    v.points.push_back(std::move(p));
  }
  v.monotone = true;
  for (std::size_t i = 1; i < v.points.size(); ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index k = 0; k < d; ++k)
        v.monotone = v.monotone &&
                     non_increasing(v.points[i - 1].second_gap(j, k), v.points[i].second_gap(j, k)) &&
                     non_increasing(v.points[i - 1].fourth_gap(j, k), v.points[i].fourth_gap(j, k));
  v.below_threshold = v.points.back().max_second_gap <= threshold && v.points.back().max_fourth_gap <= threshold;
  v.converging = v.monotone && v.below_threshold;
  return v;
}

std::string to_string(JointVerdict v) {
  switch (v) {
    case JointVerdict::converging:
      return "converging";
    case JointVerdict::not_converging:
      return "not_converging";
    case JointVerdict::undetermined:
      return "undetermined";
  }
  return "undetermined";
}

PeccatiTudorReport peccati_tudor_diagnostic(const std::vector<ChaoticVector>& sequence,
                                            const RationalMatrix& sigma, double threshold) {
  if (sequence.size() < 2) throw std::invalid_argument("the diagnostic needs at least two sequence points");
  const std::size_t d = sigma.dim();
  PeccatiTudorReport rep;
  std::vector<std::vector<double>> cov_gaps;  // off-diagonal covariance gaps per point
  for (const auto& F : sequence) {
    if (F.dim() != d) throw std::invalid_argument("sequence dimension mismatch");
    const ExactMoments m = exact_moments(F);
    const auto P = component_polys(F);
    const Rational w2 = F.scale_sq * F.scale_sq;
    PeccatiTudorPoint pt;
    std::vector<double> cg;
    for (std::size_t j = 0; j < d; ++j) {
      const double s = sigma(j, j).re().get_d();
      pt.second_gap.push_back(std::abs(m.second_at(j, j).re().get_d() - s));
      pt.fourth_gap.push_back(std::abs(m.abs4_at(j, j).get_d() - 2.0 * s * s));
      bool shared = false;
      for (std::size_t k = 0; k < d; ++k)
        shared = shared || (k != j && F.components[k].eigenvalue() == F.components[j].eigenvalue());
      if (shared) {
        const CWPoly proj = ou::project(P[j] * P[j], 2 * F.components[j].eigenvalue());
        const Rational norm = real_checked(inner_product(proj, proj), "projection norm") * w2;
        const Rational abs2 = m.second_at(j, j).re();
        pt.hyp2.emplace_back(norm - 2 * abs2 * abs2);
      } else {
        pt.hyp2.emplace_back(std::nullopt);
      }
      for (std::size_t k = 0; k < d; ++k)
        if (k != j) cg.push_back(std::abs((m.second_at(j, k) - sigma(j, k)).to_complex()));
    }
    cov_gaps.push_back(std::move(cg));
    rep.points.push_back(std::move(pt));
  }

  auto converges = [&](auto value_at) {
    for (std::size_t i = 1; i < rep.points.size(); ++i)
      if (!non_increasing(value_at(i - 1), value_at(i))) return false;
    return value_at(rep.points.size() - 1) <= threshold;
  };
  for (std::size_t j = 0; j < d; ++j) {
    const bool second = converges([&](std::size_t i) { return rep.points[i].second_gap[j]; });
    const bool fourth = converges([&](std::size_t i) { return rep.points[i].fourth_gap[j]; });
    rep.marginal_converging.push_back(second && fourth);
  }
  rep.covariance_converging = true;
  for (std::size_t e = 0; e < cov_gaps.front().size(); ++e)
    rep.covariance_converging =
        rep.covariance_converging && converges([&](std::size_t i) { return cov_gaps[i][e]; });

  rep.hypothesis2 = true;
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> values;
    for (const auto& pt : rep.points)
      if (pt.hyp2[j]) values.push_back(std::abs(pt.hyp2[j]->get_d()));
    for (std::size_t i = 1; i < values.size(); ++i)
      rep.hypothesis2 = rep.hypothesis2 && non_increasing(values[i - 1], values[i]);
    if (!values.empty()) rep.hypothesis2 = rep.hypothesis2 && values.back() <= threshold;
  }

  bool all_marginals = true;
  for (bool b : rep.marginal_converging) all_marginals = all_marginals && b;
  if (!rep.covariance_converging) rep.joint = JointVerdict::not_converging;
  else if (!rep.hypothesis2) rep.joint = JointVerdict::undetermined;
  else rep.joint = all_marginals ? JointVerdict::converging : JointVerdict::not_converging;
  return rep;
}

namespace {

nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index j = 0; j < m.rows(); ++j) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(j, k));
    out.push_back(row);
  }
  return out;
}

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index j = 0; j < m.rows(); ++j) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(cplx_to_json(m(j, k)));
    out.push_back(row);
  }
  return out;
}

}  // namespace

nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json j{{"n", r.n_label},
                   {"psi1", r.psi1},
                   {"psi2", r.psi2},
                   {"psi3", r.psi3},
                   {"thm4_bound", r.thm4_bound},
                   {"thm4_se", optional_number(r.thm4_se)},
                   {"thm1_bound", optional_number(r.thm1_bound)},
                   {"c_sigma", r.c_sigma},
                   {"empirical_w1", optional_number(r.empirical_w1)},
                   {"w1_se", optional_number(r.w1_se)}};
  if (r.exact) {
    nlohmann::json rad = nlohmann::json::array();
    for (const auto& q : r.exact->psi2_radicands) rad.push_back(rational_to_string(q));
    j["exact"] = {{"psi1", rational_to_string(r.exact->psi1)},
                  {"psi3", rational_to_string(r.exact->psi3)},
                  {"psi2_radicands", rad}};
  }
  if (r.thm1_integral) j["thm1_integral"] = rational_to_string(*r.thm1_integral);
  return j;
}

nlohmann::json to_json(const MomentSummary& m) {
  nlohmann::json j{{"d", m.d},
                   {"second_moments", matrix_to_json(m.second_moments)},
                   {"abs4", matrix_to_json(m.abs4)}};
  if (m.gram_sq) {
    nlohmann::json g = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.gram_sq->size(); ++k) g.push_back((*m.gram_sq)(k));
    j["gram_sq"] = g;
  }
  if (m.mc) {
    nlohmann::json se = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.mc->covariance.rows(); ++i) se.push_back(std::sqrt(m.mc->covariance(i, i)));
    j["mc_samples"] = m.mc->samples;
    j["mc_std_errors"] = se;
  }
  return j;
}

nlohmann::json to_json(const Cor3Verdict& v) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : v.points)
    pts.push_back({{"second_gap", matrix_to_json(p.second_gap)},
                   {"fourth_gap", matrix_to_json(p.fourth_gap)},
                   {"max_second_gap", p.max_second_gap},
                   {"max_fourth_gap", p.max_fourth_gap}});
  return {{"points", pts},
          {"threshold", v.threshold},
          {"monotone", v.monotone},
          {"below_threshold", v.below_threshold},
          {"converging", v.converging}};
}

nlohmann::json to_json(const PeccatiTudorReport& r) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : r.points) {
    nlohmann::json hyp = nlohmann::json::array();
    for (const auto& h : p.hyp2) hyp.push_back(h ? nlohmann::json(rational_to_string(*h)) : nlohmann::json(nullptr));
    pts.push_back({{"second_gap", p.second_gap}, {"fourth_gap", p.fourth_gap}, {"hypothesis2", hyp}});
  }
  return {{"points", pts},
          {"marginal_converging", r.marginal_converging},
          {"covariance_converging", r.covariance_converging},
          {"hypothesis2", r.hypothesis2},
          {"joint", to_string(r.joint)}};
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_bound_csv_header(std::ostream& out) {
  out << "n,psi1,psi2,psi3,thm4_bound,thm1_bound,empirical_w1,w1_se\n";
}

void write_bound_csv_row(std::ostream& out, const BoundReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  out << r.n_label << ',' << format_double(r.psi1) << ',' << format_double(r.psi2) << ','
      << format_double(r.psi3) << ',' << format_double(r.thm4_bound) << ',' << opt(r.thm1_bound) << ','
      << opt(r.empirical_w1) << ',' << opt(r.w1_se) << '\n';
}

}  // namespace cwchaos
