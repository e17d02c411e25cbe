#include "cwchaos/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "cwchaos/poly_json.hpp"
#include "cwchaos/rng.hpp"
#include "cwchaos/stein.hpp"

#ifndef CWCHAOS_VERSION
#define CWCHAOS_VERSION "0.0.0"
#endif

namespace cwchaos {

std::string library_version() { return CWCHAOS_VERSION; }

std::string to_string(Generator g) {
  switch (g) {
    case Generator::sum_of_squares:
      return "sum_of_squares";
    case Generator::custom_polynomial:
      return "custom_polynomial";
    case Generator::gaussian_control:
      return "gaussian_control";
  }
  return "sum_of_squares";
}

namespace {

Generator generator_from_string(const std::string& s) {
  if (s == "sum_of_squares") return Generator::sum_of_squares;
  if (s == "custom_polynomial") return Generator::custom_polynomial;
  if (s == "gaussian_control") return Generator::gaussian_control;
  throw ValidationError("unknown generator '" + s + "'");
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    if (!j.contains("seed")) throw ValidationError("config is missing 'seed'");
    cfg.name = j.at("name").get<std::string>();
    cfg.generator = generator_from_string(j.at("generator").get<std::string>());
    cfg.d = j.value("d", std::size_t{1});
    cfg.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
    cfg.target_sigma = matrix_from_json(j.at("target_sigma"));
    if (j.contains("polynomials"))
      for (const auto& p : j.at("polynomials")) cfg.polynomials.push_back(poly_from_json(p));
    if (j.contains("scale_sq")) cfg.scale_sq = rational_from_json(j.at("scale_sq"));
    cfg.exact = j.value("exact", true);
    cfg.mc_samples = j.value("mc_samples", std::size_t{0});
    cfg.w1_sample_size = j.value("w1_sample_size", std::size_t{0});
    cfg.w1_repeats = j.value("w1_repeats", std::size_t{8});
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.output_dir = j.value("output_dir", std::string("."));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j{{"name", name},
                   {"generator", to_string(generator)},
                   {"d", d},
                   {"n_grid", n_grid},
                   {"target_sigma", matrix_to_json(target_sigma)},
                   {"exact", exact},
                   {"mc_samples", mc_samples},
                   {"w1_sample_size", w1_sample_size},
                   {"w1_repeats", w1_repeats},
                   {"seed", seed}};
  if (generator == Generator::custom_polynomial) {
    nlohmann::json polys = nlohmann::json::array();
    for (const auto& p : polynomials) polys.push_back(poly_to_json(p));
    j["polynomials"] = polys;
    j["scale_sq"] = rational_to_json(scale_sq);
  }
  return j;
}

void ExperimentConfig::validate() const {
  if (name.empty()) throw ValidationError("config 'name' is empty");
  if (name.find_first_of("/\\") != std::string::npos) throw ValidationError("config 'name' must not contain path separators");
  if (d == 0) throw ValidationError("'d' must be positive");
  if (n_grid.empty()) throw ValidationError("'n_grid' is empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] == 0) throw ValidationError("'n_grid' entries must be positive");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw ValidationError("'n_grid' must be strictly increasing");
  }
  if (target_sigma.dim() != d) throw ValidationError("'target_sigma' must be d x d");
  if (!target_sigma.is_hermitian()) throw ValidationError("'target_sigma' is not Hermitian");
  try {
    GaussianSpec::centered(to_eigen(target_sigma));
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("'target_sigma': ") + e.what());
  }
  if (generator == Generator::custom_polynomial) {
    if (polynomials.size() != d) throw ValidationError("'polynomials' must hold d polynomials");
    if (sgn(scale_sq) <= 0) throw ValidationError("'scale_sq' must be positive");
  }
  if (w1_sample_size > 0 && w1_repeats == 0) throw ValidationError("'w1_repeats' must be positive");
  if (mc_samples == 1) throw ValidationError("'mc_samples' must be 0 or at least 2");
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : cfg.to_json().dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ChaoticVector sum_of_squares(std::size_t n, std::size_t d) {
  if (n == 0 || d == 0) throw std::invalid_argument("sum_of_squares needs n, d >= 1");
  ChaoticVector F;
  F.scale_sq = Rational(1) / Rational(static_cast<unsigned long>(n));
  const std::size_t vars = n * d;
  for (std::size_t k = 0; k < d; ++k) {
    CWPoly f(vars);
    for (std::size_t j = 0; j < n; ++j) {
      const auto v = static_cast<std::uint32_t>(k * n + j);
      f.add_term(Monomial::single(v, 2, 0), 1);
    }
    F.components.emplace_back(std::move(f), 2);
  }
  return F;
}

ChaoticVector gaussian_control(const RationalMatrix& sigma, std::size_t n) {
  const std::size_t d = sigma.dim();
  if (d == 0 || n == 0) throw ValidationError("gaussian_control needs a nonempty sigma and n >= 1");
  if (!sigma.is_hermitian()) throw ValidationError("gaussian_control: sigma is not Hermitian");
  RationalMatrix L(d);
  std::vector<Rational> D(d);
  for (std::size_t k = 0; k < d; ++k) {
    Rational dk = sigma(k, k).re();
    for (std::size_t m = 0; m < k; ++m) dk -= L(k, m).norm() * D[m];
    if (sgn(dk) <= 0) throw ValidationError("gaussian_control: sigma is not positive definite");
    D[k] = dk;
    L(k, k) = 1;
    for (std::size_t i = k + 1; i < d; ++i) {
      RationalComplex s = sigma(i, k);
      for (std::size_t m = 0; m < k; ++m) s -= L(i, m) * L(k, m).conj() * RationalComplex(D[m]);
      L(i, k) = s / RationalComplex(dk);
    }
  }
  std::vector<Rational> r(d);
  for (std::size_t k = 0; k < d; ++k)
    if (!exact_sqrt(D[k] / D[0], r[k]))
      throw ValidationError("gaussian_control: LDL* pivot ratios of sigma are not rational squares");

  ChaoticVector F;
  F.scale_sq = D[0] / Rational(static_cast<unsigned long>(n));
  const std::size_t vars = n * d;
  for (std::size_t i = 0; i < d; ++i) {
    CWPoly f(vars);
    for (std::size_t m = 0; m < n; ++m)
      for (std::size_t k = 0; k <= i; ++k)
        f.add_term(Monomial::single(static_cast<std::uint32_t>(m * d + k), 1, 0), L(i, k) * RationalComplex(r[k]));
    F.components.emplace_back(std::move(f), 1);
  }
  return F;
}

ChaoticVector build_sequence_member(const ExperimentConfig& cfg, std::size_t n) {
  switch (cfg.generator) {
    case Generator::sum_of_squares:
      return sum_of_squares(n, cfg.d);
    case Generator::gaussian_control:
      return gaussian_control(cfg.target_sigma, n);
    case Generator::custom_polynomial: {
      ChaoticVector F;
      F.scale_sq = cfg.scale_sq;
      try {
        for (const auto& p : cfg.polynomials) F.components.push_back(Eigenfunction::from_poly(p));
        F.validate_centered();
      } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string("custom polynomial: ") + e.what());
      }
      return F;
    }
  }
  throw ValidationError("unknown generator");
}

namespace {

struct PointOutcome {
  ExperimentPoint point;
  std::vector<InvariantCheck> checks;
};

PointOutcome run_point(const ExperimentConfig& cfg, std::size_t n, std::size_t threads) {
  PointOutcome out;
  ExperimentPoint& pt = out.point;
  pt.n = n;
  const ChaoticVector F = build_sequence_member(cfg, n);
  pt.num_vars = F.num_vars();
  const std::uint64_t seed_n = derive_seed(cfg.seed, n);
  const ComplexMatrix sigma = to_eigen(cfg.target_sigma);
  auto check = [&](std::string name, bool passed, std::string detail = {}) {
    out.checks.push_back({std::move(name), n, passed, std::move(detail)});
  };

  if (cfg.exact) {
    const ExactMoments em = exact_moments(F);
    pt.exact_moments = to_summary(em);
    try {
      pt.report = thm4_bound_exact(em, cfg.target_sigma);
      const ExactPsi& psi = *pt.report.exact;
      check("psi_nonnegative", sgn(psi.psi1) >= 0 && sgn(psi.psi3) >= 0);
      const Thm1Integrals t = thm1_integrals(F, cfg.target_sigma);
      pt.report.thm1_integral = t.total();
      pt.report.thm1_bound = 2.0 * pt.report.c_sigma * std::sqrt(t.total().get_d());
      const Comparison c = compare_with_psi(t.total(), psi);
      check("gamma_integral_within_moment_bound", c != Comparison::greater,
            c == Comparison::undetermined ? "undetermined at working precision" : "");
      if (cfg.generator == Generator::gaussian_control) {
        bool zero = sgn(psi.psi1) == 0 && sgn(psi.psi3) == 0 && sgn(t.total()) == 0;
        for (const auto& q : psi.psi2_radicands) zero = zero && sgn(q) == 0;
        check("gaussian_zero", zero);
      }
    } catch (const std::domain_error& e) {
      check("psi_nonnegative", false, e.what());
    }
  }

  if (cfg.mc_samples > 0) {
    pt.mc_moments = mc_moments(F, cfg.mc_samples, derive_seed(seed_n, 0x4d43), threads);
    try {
      pt.mc_report = thm4_bound(*pt.mc_moments, sigma);
    } catch (const std::domain_error&) {
      pt.mc_note = "Psi2 radicand estimate below -clip; Monte Carlo bound unavailable";
    }
    if (!cfg.exact) {
      if (pt.mc_report) {
        pt.report = *pt.mc_report;
      } else {
        pt.report.c_sigma = stein_constant(sigma);
        pt.report.psi1 = pt.report.psi2 = pt.report.psi3 = pt.report.thm4_bound =
            std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  pt.report.n_label = std::to_string(n);

  if (cfg.w1_sample_size > 0) {
    pt.w1 = estimate_dw(chaos_source(F), GaussianSpec::centered(sigma), cfg.w1_sample_size, cfg.w1_repeats,
                        derive_seed(seed_n, 0x5731), threads);
    pt.report.empirical_w1 = pt.w1->mean;
    pt.report.w1_se = pt.w1->std_error;
  }
  return out;
}

}  // namespace

bool ExperimentResult::passed() const {
  for (const auto& c : invariants)
    if (!c.passed) return false;
  return true;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t threads) {
  cfg.validate();
  const std::size_t workers = std::min(resolve_threads(threads), cfg.n_grid.size());
  const std::size_t inner = std::max<std::size_t>(1, resolve_threads(threads) / workers);
  auto outcomes = run_blocks<PointOutcome>(
      cfg.n_grid.size(), workers,
      [&](std::size_t i, std::size_t, std::size_t) { return run_point(cfg, cfg.n_grid[i], inner); }, 1);

  ExperimentResult res;
  res.config = cfg;
  for (auto& o : outcomes) {
    res.points.push_back(std::move(o.point));
    for (auto& c : o.checks) res.invariants.push_back(std::move(c));
  }
  if (cfg.exact && res.points.size() >= 2) {
    std::vector<MomentSummary> seq;
    for (const auto& p : res.points) seq.push_back(*p.exact_moments);
    res.cor3 = cor3_diagnostic(seq, to_eigen(cfg.target_sigma));
    if (cfg.d >= 2) {
      std::vector<ChaoticVector> members;
      for (std::size_t n : cfg.n_grid) members.push_back(build_sequence_member(cfg, n));
      res.peccati_tudor = peccati_tudor_diagnostic(members, cfg.target_sigma);
    }
  }
  return res;
}

nlohmann::json ExperimentResult::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points) {
    nlohmann::json j{{"n", p.n}, {"num_vars", p.num_vars}, {"bound", cwchaos::to_json(p.report)}};
    if (p.exact_moments) j["exact_moments"] = cwchaos::to_json(*p.exact_moments);
    if (p.mc_moments) {
      nlohmann::json mc{{"moments", cwchaos::to_json(*p.mc_moments)}};
      mc["bound"] = p.mc_report ? cwchaos::to_json(*p.mc_report) : nlohmann::json(nullptr);
      if (!p.mc_note.empty()) mc["note"] = p.mc_note;
      j["mc"] = mc;
    }
    if (p.w1) j["w1"] = cwchaos::to_json(*p.w1);
    pts.push_back(j);
  }
  nlohmann::json inv = nlohmann::json::array();
  for (const auto& c : invariants)
    inv.push_back({{"name", c.name}, {"n", c.n}, {"passed", c.passed}, {"detail", c.detail}});
  nlohmann::json doc{{"schema_version", kSchemaVersion},
                     {"name", config.name},
                     {"version", library_version()},
                     {"config_hash", config_hash(config)},
                     {"seed", config.seed},
                     {"config", config.to_json()},
                     {"points", pts},
                     {"invariants", inv},
                     {"passed", passed()}};
  if (cor3) doc["cor3"] = cwchaos::to_json(*cor3);
  if (peccati_tudor) doc["peccati_tudor"] = cwchaos::to_json(*peccati_tudor);
  return doc;
}

std::string ExperimentResult::csv() const {
  std::ostringstream out;
  out << "# " << config.name << " schema_version=" << kSchemaVersion << " version=" << library_version()
      << " config_hash=" << config_hash(config) << " seed=" << config.seed << '\n';
  write_bound_csv_header(out);
  for (const auto& p : points) write_bound_csv_row(out, p.report);
  return out.str();
}

std::vector<std::string> write_experiment_outputs(const ExperimentResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path base = fs::path(dir) / result.config.name;
  const std::string csv_path = base.string() + ".csv";
  const std::string json_path = base.string() + ".json";
  {
    std::ofstream f(csv_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + csv_path);
    f << result.csv();
  }
  {
    std::ofstream f(json_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + json_path);
    f << result.to_json().dump(2) << '\n';
  }
  return {csv_path, json_path};
}

}  // namespace cwchaos
