#include "cwchaos/verify.hpp"

#include <chrono>
#include <algorithm>
#include <functional>

#include "cwchaos/fields.hpp"
#include "cwchaos/hermite.hpp"
#include "cwchaos/poly_json.hpp"

namespace cwchaos {

namespace {

constexpr std::size_t kMaxRecordedFailures = 5;

int uniform_int(Engine& engine, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(engine);
}

std::size_t uniform_index(Engine& engine, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(engine);
}

// All (p, q) multi-indices of length n with |p| + |q| <= max_degree.
std::vector<PhiIndex> all_indices(std::size_t n, unsigned max_degree) {
  std::vector<PhiIndex> out;
  std::vector<unsigned> slots(2 * n, 0);
  std::function<void(std::size_t, unsigned)> rec = [&](std::size_t at, unsigned left) {
    if (at == slots.size()) {
      std::span<const unsigned> all(slots);
      out.emplace_back(all.first(n), all.subspan(n));
      return;
    }
    for (unsigned v = 0; v <= left; ++v) {
      slots[at] = v;
      rec(at + 1, left - v);
    }
    slots[at] = 0;
  };
  rec(0, max_degree);
  return out;
}

PhiIndex random_index(Engine& engine, std::size_t n, unsigned degree) {
  std::vector<unsigned> slots(2 * n, 0);
  for (unsigned k = 0; k < degree; ++k) ++slots[uniform_index(engine, 0, 2 * n - 1)];
  std::span<const unsigned> all(slots);
  return PhiIndex(all.first(n), all.subspan(n));
}

template <class Fn>
SuiteResult timed(std::string name, Fn fn) {
  SuiteResult r;
  r.name = std::move(name);
  const auto start = std::chrono::steady_clock::now();
  fn(r);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace

void SuiteResult::record(bool ok, const std::string& what) {
  if (ok) {
    ++passed;
    return;
  }
  ++failed;
  if (failures.size() < kMaxRecordedFailures) failures.push_back(what);
}

RationalComplex random_coefficient(Engine& engine, int range) {
  while (true) {
    const int a = uniform_int(engine, -range, range);
    const int b = uniform_int(engine, -range, range);
    if (a == 0 && b == 0) continue;
    const int c = uniform_int(engine, 1, range);
    return RationalComplex(Rational(a) / c, Rational(b) / c);
  }
}

CWPoly random_poly(Engine& engine, const RandomPolyOptions& opt) {
  CWPoly f(opt.num_vars);
  const std::size_t terms = uniform_index(engine, 1, opt.max_terms);
  for (std::size_t t = 0; t < terms; ++t) {
    const auto degree = static_cast<unsigned>(uniform_index(engine, 0, opt.max_degree));
    f.add_term(random_index(engine, opt.num_vars, degree), random_coefficient(engine, opt.coeff_range));
  }
  return f;
}

Eigenfunction random_eigenfunction(Engine& engine, std::size_t num_vars, unsigned eigenvalue,
                                   std::size_t max_terms, int coeff_range) {
  while (true) {
    CWPoly f(num_vars);
    const std::size_t terms = uniform_index(engine, 1, max_terms);
    for (std::size_t t = 0; t < terms; ++t)
      f += hermite::product_element(num_vars, random_index(engine, num_vars, eigenvalue)) *
           random_coefficient(engine, coeff_range);
    if (!f.is_zero()) return Eigenfunction(std::move(f), eigenvalue);
  }
}

CWPoly random_chaos_poly(Engine& engine, std::size_t num_vars, unsigned max_eigenvalue,
                         std::size_t max_terms, int coeff_range) {
  while (true) {
    CWPoly f(num_vars);
    const std::size_t terms = uniform_index(engine, 1, max_terms);
    for (std::size_t t = 0; t < terms; ++t) {
      const auto degree = static_cast<unsigned>(uniform_index(engine, 0, max_eigenvalue));
      f += hermite::product_element(num_vars, random_index(engine, num_vars, degree)) *
           random_coefficient(engine, coeff_range);
    }
    if (!f.is_zero()) return f;
  }
}

SuiteResult hermite_orthonormality_suite(unsigned max_degree, std::size_t max_vars) {
  return timed("hermite_orthonormality", [&](SuiteResult& r) {
    for (std::size_t n = 1; n <= max_vars; ++n) {
      const auto indices = all_indices(n, max_degree);
      std::vector<CWPoly> polys;
      for (const auto& idx : indices) polys.push_back(hermite::product_element(n, idx));
      for (std::size_t a = 0; a < indices.size(); ++a)
        for (std::size_t b = a; b < indices.size(); ++b) {
          const RationalComplex expected = a == b ? RationalComplex(hermite::norm_sq(indices[a])) : RationalComplex();
          r.record(inner_product(polys[a], polys[b]) == expected,
                   "n=" + std::to_string(n) + " " + polys[a].to_string() + " vs " + polys[b].to_string());
        }
    }
  });
}

SuiteResult l_eigen_suite(unsigned max_degree, std::size_t max_vars) {
  return timed("l_eigen_relation", [&](SuiteResult& r) {
    for (std::size_t n = 1; n <= max_vars; ++n)
      for (const auto& idx : all_indices(n, max_degree)) {
        const CWPoly h = hermite::product_element(n, idx);
        const CWPoly expected = h * RationalComplex(-static_cast<long>(idx.total_degree()));
        r.record(ou::apply_L(h, ou::LRoute::hermite) == expected, "hermite route " + h.to_string());
        r.record(ou::apply_L(h, ou::LRoute::differential) == expected, "differential route " + h.to_string());
      }
  });
}

SuiteResult gamma_routes_suite(std::uint64_t seed, std::size_t pairs) {
  return timed("gamma_routes", [&](SuiteResult& r) {
    Engine engine = make_engine(seed, 0x6a11);
    for (std::size_t i = 0; i < pairs; ++i) {
      const RandomPolyOptions opt{uniform_index(engine, 1, 3), 3, 4, 3};
      const CWPoly f = random_poly(engine, opt), g = random_poly(engine, opt);
      r.record(ou::gamma(f, g, ou::GammaRoute::closed_form) == ou::gamma(f, g, ou::GammaRoute::defining),
               f.to_string() + " , " + g.to_string());
    }
  });
}

SuiteResult integration_by_parts_suite(std::uint64_t seed, std::size_t pairs) {
  return timed("integration_by_parts", [&](SuiteResult& r) {
    Engine engine = make_engine(seed, 0x1b95);
    for (std::size_t i = 0; i < pairs; ++i) {
      const RandomPolyOptions opt{uniform_index(engine, 1, 3), 3, 4, 3};
      const CWPoly f = random_poly(engine, opt), g = random_poly(engine, opt);
      r.record(gaussian_expectation(ou::gamma(f, g)) == -expectation_of_product(f, ou::apply_L(g.conj())),
               f.to_string() + " , " + g.to_string());
    }
  });
}

namespace {

struct ComposeCase {
  CWPoly phi;
  std::vector<CWPoly> F;
};

ComposeCase random_compose_case(Engine& engine) {
  const std::size_t d = uniform_index(engine, 1, 2);
  const std::size_t n = uniform_index(engine, 1, 2);
  ComposeCase c{random_poly(engine, {d, 3, 4, 3}), {}};
  for (std::size_t j = 0; j < d; ++j) c.F.push_back(random_poly(engine, {n, 2, 3, 3}));
  return c;
}

}  // namespace

SuiteResult diffusion_suite(std::uint64_t seed, std::size_t count) {
  return timed("diffusion_property", [&](SuiteResult& r) {
    Engine engine = make_engine(seed, 0xd1ff);
    for (std::size_t i = 0; i < count; ++i) {
      const ComposeCase c = random_compose_case(engine);
      const std::size_t d = c.F.size();
      const std::size_t n = c.F.front().num_vars();
      std::vector<CWPoly> Fbar;
      for (const auto& f : c.F) Fbar.push_back(f.conj());
      CWPoly rhs(n);
      for (std::size_t j = 0; j < d; ++j) {
        const CWPoly dz = wirtinger_diff(c.phi, j, false);
        const CWPoly dzb = wirtinger_diff(c.phi, j, true);
        rhs += ou::compose(dz, c.F) * ou::apply_L(c.F[j]);
        rhs += ou::compose(dzb, c.F) * ou::apply_L(Fbar[j]);
        for (std::size_t k = 0; k < d; ++k) {
          rhs += ou::compose(wirtinger_diff(dz, k, false), c.F) * ou::gamma(c.F[j], Fbar[k]);
          rhs += ou::compose(wirtinger_diff(dzb, k, true), c.F) * ou::gamma(Fbar[j], c.F[k]);
          rhs += ou::compose(wirtinger_diff(dz, k, true), c.F) * ou::gamma(c.F[j], c.F[k]);
          rhs += ou::compose(wirtinger_diff(dzb, k, false), c.F) * ou::gamma(Fbar[j], Fbar[k]);
        }
      }
      r.record(ou::apply_L(ou::compose(c.phi, c.F)) == rhs, "phi=" + c.phi.to_string());
    }
  });
}

SuiteResult chain_rule_suite(std::uint64_t seed, std::size_t count) {
  return timed("chain_rule", [&](SuiteResult& r) {
    Engine engine = make_engine(seed, 0xc4a1);
    for (std::size_t i = 0; i < count; ++i) {
      const ComposeCase c = random_compose_case(engine);
      const std::size_t n = c.F.front().num_vars();
      const CWPoly g = random_poly(engine, {n, 3, 4, 3});
      CWPoly rhs(n);
      for (std::size_t j = 0; j < c.F.size(); ++j) {
        rhs += ou::compose(wirtinger_diff(c.phi, j, false), c.F) * ou::gamma(c.F[j], g);
        rhs += ou::compose(wirtinger_diff(c.phi, j, true), c.F) * ou::gamma(c.F[j].conj(), g);
      }
      r.record(ou::gamma(ou::compose(c.phi, c.F), g) == rhs, "phi=" + c.phi.to_string());
    }
  });
}

SuiteResult thm3_suite(std::uint64_t seed, std::size_t count) {
  return timed("spectral_inequality", [&](SuiteResult& r) {
    Engine engine = make_engine(seed, 0x7403);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t n = uniform_index(engine, 1, 2);
      const auto top = static_cast<unsigned>(uniform_index(engine, 1, 4));
      const CWPoly f = random_chaos_poly(engine, n, top);
      const unsigned lambda_p = hermite::to_hermite(f).max_eigenvalue();
      const Rational eta = Rational(lambda_p) + Rational(uniform_int(engine, 0, 6)) / 2;
      const auto res = ou::check_thm3(f, eta);
      r.record(res.holds, "f=" + f.to_string() + " eta=" + rational_to_string(eta));
    }
  });
}

SuiteResult cor1_suite(std::uint64_t seed, std::size_t count) {
  return timed("gamma_moment_inequality", [&](SuiteResult& r) {
    Engine engine = make_engine(seed, 0xc021);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t n = uniform_index(engine, 1, 2);
      const Eigenfunction f1 = random_eigenfunction(engine, n, static_cast<unsigned>(uniform_index(engine, 1, 3)));
      const Eigenfunction f2 = random_eigenfunction(engine, n, static_cast<unsigned>(uniform_index(engine, 1, 3)));
      const auto res = ou::check_cor1(f1, f2);
      r.record(res.holds, "F1=" + f1.poly().to_string() + " F2=" + f2.poly().to_string());
    }
  });
}

std::vector<SuiteResult> run_identity_suite(const IdentitySuiteConfig& cfg) {
  std::vector<SuiteResult> out;
  out.push_back(hermite_orthonormality_suite());
  out.push_back(l_eigen_suite());
  out.push_back(gamma_routes_suite(cfg.seed, cfg.num_pairs));
  out.push_back(integration_by_parts_suite(cfg.seed, cfg.num_pairs));
  out.push_back(diffusion_suite(cfg.seed, cfg.num_spot_checks));
  out.push_back(chain_rule_suite(cfg.seed, cfg.num_spot_checks));
  out.push_back(thm3_suite(cfg.seed, cfg.num_spectral));
  out.push_back(cor1_suite(cfg.seed, cfg.num_spectral));
  return out;
}

nlohmann::json to_json(const SuiteResult& r) {
  return {{"name", r.name}, {"passed", r.passed}, {"failed", r.failed}, {"failures", r.failures}};
}

}  // namespace cwchaos

namespace cwchaos {

std::vector<std::vector<cplx>> stein_battery_points() {
  const std::vector<cplx> pts{{0.0, 0.0},   {0.5, 0.0},  {-1.0, 0.5}, {0.0, 1.0},  {1.5, -0.5},
                              {-0.3, -1.2}, {2.0, 0.0},  {0.0, -2.0}, {0.8, 0.8},  {-1.5, 1.0}};
  std::vector<std::vector<cplx>> out;
  for (const auto& z : pts) out.push_back({z});
  return out;
}

bool SteinBattery::semigroup_passed() const {
  return !semigroup.empty() &&
         std::all_of(semigroup.begin(), semigroup.end(), [](const auto& c) { return c.passed(); });
}

bool SteinBattery::residuals_passed() const {
  return !residuals.empty() &&
         std::all_of(residuals.begin(), residuals.end(), [](const auto& r) { return r.second.passed(); });
}

bool SteinBattery::hessian_passed() const {
  return !hessian.empty() &&
         std::all_of(hessian.begin(), hessian.end(), [](const auto& r) { return r.second.passed; });
}

SteinBattery run_stein_battery(const SteinSolverConfig& cfg, double tolerance, double slack) {
  const GaussianSpec spec = GaussianSpec::standard(1);
  const auto points = stein_battery_points();
  const CWPoly z = CWPoly::z(1, 0), zb = CWPoly::zbar(1, 0);
  const CWPoly re_z = (z + zb) * RationalComplex(Rational(1, 2));
  const CWPoly abs2_minus_1 = z * zb - CWPoly::constant(1, 1);

  struct Case {
    std::string name;
    FieldPtr field;
    std::function<cplx(cplx)> closed_form;
  };
  const std::vector<Case> cases{
      {"re_z", make_poly_field(re_z, "re_z"), [](cplx w) { return cplx(w.real(), 0.0); }},
      {"abs2_minus_1", make_poly_field(abs2_minus_1, "abs2_minus_1"),
       [](cplx w) { return cplx(0.5 * (std::norm(w) - 1.0), 0.0); }}};

  SteinBattery b;
  for (const auto& c : cases) {
    const SteinSolver solver(c.field, spec, cfg);
    for (const auto& p : points) {
      SemigroupCheck s;
      s.field = c.name;
      s.point = p[0];
      s.value = solver.semigroup_integral(p).value();
      s.expected = c.closed_form(p[0]);
      s.error = std::abs(s.value - s.expected);
      s.tolerance = tolerance;
      b.semigroup.push_back(s);
    }
    for (auto& r : check_stein_residual(solver, points, tolerance)) b.residuals.emplace_back(c.name, std::move(r));
    if (c.name == "re_z")
      for (double alpha : {0.0, 0.5, 1.0})
        b.hessian.emplace_back(c.name, check_hessian_bounds(solver, points, alpha, slack));
  }
  const SteinSolver bump(make_gaussian_bump_field(1), spec, cfg);
  for (double alpha : {0.0, 0.5, 1.0})
    b.hessian.emplace_back("gaussian_bump", check_hessian_bounds(bump, points, alpha, slack));
  return b;
}

nlohmann::json to_json(const SteinBattery& b) {
  nlohmann::json sg = nlohmann::json::array();
  for (const auto& s : b.semigroup)
    sg.push_back({{"field", s.field},
                  {"point", cplx_to_json(s.point)},
                  {"value", cplx_to_json(s.value)},
                  {"expected", cplx_to_json(s.expected)},
                  {"error", s.error},
                  {"passed", s.passed()}});
  nlohmann::json res = nlohmann::json::array();
  for (const auto& [name, r] : b.residuals) {
    nlohmann::json j = to_json(r);
    j["field"] = name;
    res.push_back(j);
  }
  nlohmann::json hess = nlohmann::json::array();
  for (const auto& [name, r] : b.hessian) {
    nlohmann::json j = to_json(r);
    j["field"] = name;
    hess.push_back(j);
  }
  return {{"semigroup", sg}, {"residuals", res}, {"hessian", hess}, {"passed", b.passed()}};
}

}  // namespace cwchaos
