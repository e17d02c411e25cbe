#include "cwchaos/cgauss.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace cwchaos {

ComplexMatrix to_eigen(const RationalMatrix& m) {
  const auto d = static_cast<Eigen::Index>(m.dim());
  ComplexMatrix out(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = 0; k < d; ++k)
      out(j, k) = m(static_cast<std::size_t>(j), static_cast<std::size_t>(k)).to_complex();
  return out;
}

GaussianSpec::GaussianSpec(ComplexVector mu, ComplexMatrix sigma)
    : mu_(std::move(mu)), sigma_(std::move(sigma)) {
  const auto d = sigma_.rows();
  if (d == 0 || sigma_.cols() != d || mu_.size() != d)
    throw std::invalid_argument("covariance must be square and match the mean");
  const double scale = std::max(1.0, sigma_.cwiseAbs().maxCoeff());
  if ((sigma_ - sigma_.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("covariance is not Hermitian");
  sigma_ = 0.5 * (sigma_ + sigma_.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sigma_);
  if (es.info() != Eigen::Success) throw std::invalid_argument("eigendecomposition failed");
  eigenvalues_ = es.eigenvalues();
  if (!(eigenvalues_.minCoeff() > 0.0)) throw std::invalid_argument("covariance is not positive definite");
  const ComplexMatrix& v = es.eigenvectors();
  sqrt_ = v * eigenvalues_.cwiseSqrt().cast<cplx>().asDiagonal() * v.adjoint();
  inverse_ = v * eigenvalues_.cwiseInverse().cast<cplx>().asDiagonal() * v.adjoint();
  if ((sqrt_.adjoint() * sqrt_ - sigma_).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("square root does not reproduce the covariance");
}

GaussianSpec GaussianSpec::standard(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return {ComplexVector::Zero(n), ComplexMatrix::Identity(n, n)};
}

GaussianSpec GaussianSpec::centered(ComplexMatrix sigma) {
  ComplexVector mu = ComplexVector::Zero(sigma.rows());
  return {std::move(mu), std::move(sigma)};
}

double GaussianSpec::determinant() const { return eigenvalues_.prod(); }

double density(const GaussianSpec& spec, std::span<const cplx> z) {
  if (z.size() != spec.dim()) throw std::invalid_argument("point dimension mismatch");
  const ComplexVector x = Eigen::Map<const ComplexVector>(z.data(), static_cast<Eigen::Index>(z.size())) - spec.mu();
  const double quad = (x.adjoint() * spec.sigma_inverse() * x)(0, 0).real();
  const double d = static_cast<double>(spec.dim());
  return std::exp(-quad) / (std::pow(std::numbers::pi, d) * std::abs(spec.determinant()));
}

cplx char_fn(const GaussianSpec& spec, std::span<const cplx> zeta) {
  if (zeta.size() != spec.dim()) throw std::invalid_argument("point dimension mismatch");
  const auto v = Eigen::Map<const ComplexVector>(zeta.data(), static_cast<Eigen::Index>(zeta.size()));
  const double phase = spec.mu().dot(v).real();  // dot conjugates the first argument
  const double quad = (v.adjoint() * spec.sigma() * v)(0, 0).real();
  return std::exp(cplx(-0.25 * quad, phase));
}

namespace {

// Draws `count` rows of block `b` into `rows` (count x d).
void draw_block(const GaussianSpec& spec, std::uint64_t seed, std::size_t b, std::size_t count,
                SampleMatrix& rows) {
  const auto d = static_cast<Eigen::Index>(spec.dim());
  Engine engine = make_engine(seed, b);
  rows.resize(static_cast<Eigen::Index>(count), d);
  ComplexVector zs(d);
  for (std::size_t r = 0; r < count; ++r) {
    fill_standard_complex_normal(engine, std::span<cplx>(zs.data(), static_cast<std::size_t>(d)));
    rows.row(static_cast<Eigen::Index>(r)) = (spec.mu() + spec.sqrt_factor() * zs).transpose();
  }
}

struct PairStats {
  RunningStats lre, lim, rre, rim, dre, dim;
  void add(cplx l, cplx r) {
    lre.add(l.real());
    lim.add(l.imag());
    rre.add(r.real());
    rim.add(r.imag());
    dre.add((l - r).real());
    dim.add((l - r).imag());
  }
  void merge(const PairStats& o) {
    lre.merge(o.lre);
    lim.merge(o.lim);
    rre.merge(o.rre);
    rim.merge(o.rim);
    dre.merge(o.dre);
    dim.merge(o.dim);
  }
};

// Evaluates fn(row, jet) -> {lhs, rhs} on the draws of CN(mu, Sigma).
template <class Fn>
McIdentity mc_identity(std::string name, const GaussianSpec& spec, const ScalarField& field,
                       std::size_t count, std::uint64_t seed, std::size_t threads, Fn fn) {
  if (count == 0) throw std::invalid_argument("sample count must be positive");
  if (field.dim() != spec.dim()) throw std::invalid_argument("field dimension mismatch");
  auto blocks = run_blocks<PairStats>(count, threads, [&](std::size_t b, std::size_t, std::size_t n) {
    SampleMatrix rows;
    draw_block(spec, seed, b, n, rows);
    PairStats s;
    Jet2 jet(spec.dim(), 0.0);
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
      const std::span<const cplx> z(rows.row(r).data(), spec.dim());
      field.jet(z, jet);
      const auto [l, rhs] = fn(z, jet);
      if (!std::isfinite(l.real()) || !std::isfinite(l.imag()) || !std::isfinite(rhs.real()) ||
          !std::isfinite(rhs.imag()))
        throw std::domain_error("non-finite Monte Carlo value in " + field.name());
      s.add(l, rhs);
    }
    return s;
  });
  PairStats total;
  for (const auto& b : blocks) total.merge(b);
  McIdentity out;
  out.name = std::move(name);
  out.lhs = {total.lre.mean(), total.lim.mean()};
  out.rhs = {total.rre.mean(), total.rim.mean()};
  out.residual = {total.dre.mean(), total.dim.mean()};
  out.se_re = total.dre.std_error();
  out.se_im = total.dim.std_error();
  out.samples = count;
  return out;
}

RationalComplex sigma_entry(const RationalMatrix& s, std::size_t j, std::size_t k) { return s(j, k); }

}  // namespace

SampleMatrix sample(const GaussianSpec& spec, std::size_t count, std::uint64_t seed,
                    std::size_t threads) {
  if (count == 0) throw std::invalid_argument("sample count must be positive");
  auto blocks = run_blocks<SampleMatrix>(count, threads, [&](std::size_t b, std::size_t, std::size_t n) {
    SampleMatrix rows;
    draw_block(spec, seed, b, n, rows);
    return rows;
  });
  SampleMatrix out(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(spec.dim()));
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.middleRows(at, b.rows()) = b;
    at += b.rows();
  }
  return out;
}

void write_samples_csv(std::ostream& out, const SampleMatrix& samples) {
  for (Eigen::Index j = 0; j < samples.cols(); ++j)
    out << (j ? "," : "") << "re_" << j + 1 << ",im_" << j + 1;
  out << '\n';
  char buf[64];
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    for (Eigen::Index j = 0; j < samples.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", samples(r, j).real());
      out << (j ? "," : "") << buf;
      std::snprintf(buf, sizeof buf, "%.17g", samples(r, j).imag());
      out << ',' << buf;
    }
    out << '\n';
  }
}

SampleMatrix read_samples_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("sample file is empty");
  std::size_t columns = 1;
  for (char c : line) columns += c == ',';
  if (columns % 2 != 0 || line.rfind("re_1", 0) != 0)
    throw std::runtime_error("sample header must be re_1,im_1,...");
  const std::size_t d = columns / 2;
  std::vector<cplx> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw std::runtime_error("malformed number in sample file: " + cell);
      }
    }
    if (row.size() != columns)
      throw std::runtime_error("sample row " + std::to_string(rows + 1) + " has wrong arity");
    for (std::size_t j = 0; j < d; ++j) values.emplace_back(row[2 * j], row[2 * j + 1]);
    ++rows;
  }
  SampleMatrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < d; ++j)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = values[r * d + j];
  return out;
}

bool McIdentity::within(double k, double floor) const {
  return std::abs(residual.real()) <= k * se_re + floor &&
         std::abs(residual.imag()) <= k * se_im + floor;
}

bool MomentCheck::within(double k) const {
  const cplx gap = estimate - target;
  return std::abs(gap.real()) <= k * se_re + 1e-12 && std::abs(gap.imag()) <= k * se_im + 1e-12;
}

std::vector<MomentCheck> sampler_moment_checks(const GaussianSpec& spec, std::size_t count,
                                               std::uint64_t seed, std::size_t threads) {
  const std::size_t d = spec.dim();
  // Quantities: E[X_j conj X_k] for all j,k; E[X_j X_k] for j <= k; E|X|^4 when d == 1.
  struct Q {
    std::string name;
    std::size_t j, k;
    int kind;  // 0 covariance, 1 relation, 2 fourth
    cplx target;
  };
  std::vector<Q> qs;
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < d; ++k)
      qs.push_back({"cov(" + std::to_string(j + 1) + "," + std::to_string(k + 1) + ")", j, k, 0,
                    spec.sigma()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k))});
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = j; k < d; ++k)
      qs.push_back({"rel(" + std::to_string(j + 1) + "," + std::to_string(k + 1) + ")", j, k, 1, 0.0});
  if (d == 1) {
    const double s2 = spec.sigma()(0, 0).real();
    qs.push_back({"E|Z|^4", 0, 0, 2, 2.0 * s2 * s2});
  }

  struct Acc {
    std::vector<RunningStats> re, im;
  };
  auto blocks = run_blocks<Acc>(count, threads, [&](std::size_t b, std::size_t, std::size_t n) {
    SampleMatrix rows;
    draw_block(spec, seed, b, n, rows);
    Acc acc{std::vector<RunningStats>(qs.size()), std::vector<RunningStats>(qs.size())};
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
      for (std::size_t i = 0; i < qs.size(); ++i) {
        const auto& q = qs[i];
        const cplx xj = rows(r, static_cast<Eigen::Index>(q.j)) - spec.mu()(static_cast<Eigen::Index>(q.j));
        const cplx xk = rows(r, static_cast<Eigen::Index>(q.k)) - spec.mu()(static_cast<Eigen::Index>(q.k));
        cplx v = q.kind == 0 ? xj * std::conj(xk) : q.kind == 1 ? xj * xk : std::norm(xj) * std::norm(xj);
        acc.re[i].add(v.real());
        acc.im[i].add(v.imag());
      }
    }
    return acc;
  });
  std::vector<MomentCheck> out;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    RunningStats re, im;
    for (const auto& b : blocks) {
      re.merge(b.re[i]);
      im.merge(b.im[i]);
    }
    out.push_back({qs[i].name, {re.mean(), im.mean()}, qs[i].target, re.std_error(), im.std_error()});
  }
  return out;
}

std::vector<McIdentity> verify_ibp(const GaussianSpec& spec, const FieldPtr& phi, std::size_t i,
                                   std::size_t count, std::uint64_t seed, std::size_t threads,
                                   const RationalMatrix* exact_sigma) {
  if (!spec.is_centered()) throw std::invalid_argument("integration by parts needs mu = 0");
  const std::size_t d = spec.dim();
  if (i >= d) throw std::out_of_range("coordinate index out of range");
  const ComplexMatrix& s = spec.sigma();
  const auto ii = static_cast<Eigen::Index>(i);

  std::vector<McIdentity> out;
  out.push_back(mc_identity("ibp_z" + std::to_string(i + 1), spec, *phi, count, seed, threads,
                            [&](std::span<const cplx> z, const Jet2& jet) {
                              cplx rhs = 0.0;
                              for (std::size_t j = 0; j < d; ++j)
                                rhs += s(ii, static_cast<Eigen::Index>(j)) * jet.dzbar(j);
                              return std::pair{z[i] * jet.value(), rhs};
                            }));
  out.push_back(mc_identity("ibp_zbar" + std::to_string(i + 1), spec, *phi, count, seed, threads,
                            [&](std::span<const cplx> z, const Jet2& jet) {
                              cplx rhs = 0.0;
                              for (std::size_t j = 0; j < d; ++j)
                                rhs += s(static_cast<Eigen::Index>(j), ii) * jet.dz(j);
                              return std::pair{std::conj(z[i]) * jet.value(), rhs};
                            }));

  if (const CWPoly* f = phi->polynomial(); f && exact_sigma) {
    const CWPoly zi = CWPoly::z(d, i), zbi = CWPoly::zbar(d, i);
    RationalComplex r15, r16;
    for (std::size_t j = 0; j < d; ++j) {
      r15 += sigma_entry(*exact_sigma, i, j) * gaussian_expectation(wirtinger_diff(*f, j, true), *exact_sigma);
      r16 += sigma_entry(*exact_sigma, j, i) * gaussian_expectation(wirtinger_diff(*f, j, false), *exact_sigma);
    }
    out[0].exact_lhs = gaussian_expectation(zi * *f, *exact_sigma);
    out[0].exact_rhs = r15;
    out[1].exact_lhs = gaussian_expectation(zbi * *f, *exact_sigma);
    out[1].exact_rhs = r16;
  }
  return out;
}

McIdentity verify_lemma1(const FieldPtr& f, std::size_t count, std::uint64_t seed,
                         std::size_t threads) {
  if (f->dim() != 1) throw std::invalid_argument("the one-dimensional characterization needs d = 1");
  const GaussianSpec spec = GaussianSpec::standard(1);
  McIdentity out = mc_identity("lemma1", spec, *f, count, seed, threads,
                               [](std::span<const cplx> z, const Jet2& jet) {
                                 return std::pair{jet.dz(0), std::conj(z[0]) * jet.value()};
                               });
  if (const CWPoly* p = f->polynomial()) {
    out.exact_lhs = gaussian_expectation(wirtinger_diff(*p, 0, false));
    out.exact_rhs = gaussian_expectation(CWPoly::zbar(1, 0) * *p);
  }
  return out;
}

McIdentity verify_stein_characterization(const GaussianSpec& spec, const FieldPtr& f,
                                         std::size_t count, std::uint64_t seed,
                                         std::size_t threads, const RationalMatrix* exact_sigma) {
  if (!spec.is_centered()) throw std::invalid_argument("Stein characterization needs mu = 0");
  const std::size_t d = spec.dim();
  const ComplexMatrix& s = spec.sigma();
  McIdentity out = mc_identity("stein_char", spec, *f, count, seed, threads,
                               [&](std::span<const cplx> z, const Jet2& jet) {
                                 cplx v = 0.0;
                                 for (std::size_t j = 0; j < d; ++j) {
                                   const auto jj = static_cast<Eigen::Index>(j);
                                   for (std::size_t k = 0; k < d; ++k) {
                                     const auto kk = static_cast<Eigen::Index>(k);
                                     v += jet.dzbz(j, k) * s(kk, jj) + jet.dzzb(j, k) * s(jj, kk);
                                   }
                                   v -= jet.dz(j) * z[j] + jet.dzbar(j) * std::conj(z[j]);
                                 }
                                 return std::pair{v, cplx(0.0)};
                               });
  if (const CWPoly* p = f->polynomial(); p && exact_sigma) {
    out.exact_lhs = gaussian_expectation(stein_operator(*p, *exact_sigma), *exact_sigma);
    out.exact_rhs = RationalComplex();
  }
  return out;
}

CWPoly stein_operator(const CWPoly& f, const RationalMatrix& sigma) {
  const std::size_t d = f.num_vars();
  if (sigma.dim() != d) throw std::invalid_argument("covariance dimension mismatch");
  CWPoly out(d);
  for (std::size_t j = 0; j < d; ++j) {
    const CWPoly dj = wirtinger_diff(f, j, false);
    const CWPoly dbj = wirtinger_diff(f, j, true);
    for (std::size_t k = 0; k < d; ++k) {
      out += wirtinger_diff(dbj, k, false) * sigma(k, j);
      out += wirtinger_diff(dj, k, true) * sigma(j, k);
    }
    out -= dj * CWPoly::z(d, j) + dbj * CWPoly::zbar(d, j);
  }
  return out;
}

}  // namespace cwchaos
