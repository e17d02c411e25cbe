#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "cwchaos/cgauss.hpp"
#include "cwchaos/experiment.hpp"
#include "cwchaos/fourth_moment.hpp"
#include "cwchaos/poly_json.hpp"
#include "cwchaos/stein.hpp"
#include "cwchaos/transport.hpp"
#include "cwchaos/verify.hpp"

namespace {

using namespace cwchaos;

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitInvariant = 3;

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::size_t threads = 0;
};

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// A single polynomial, or {"polynomials": [...], "scale_sq": r}.
ChaoticVector chaotic_vector_from_json(const nlohmann::json& j) {
  ChaoticVector F;
  std::vector<CWPoly> polys;
  if (j.contains("polynomials")) {
    for (const auto& p : j.at("polynomials")) polys.push_back(poly_from_json(p));
    if (j.contains("scale_sq")) F.scale_sq = rational_from_json(j.at("scale_sq"));
  } else {
    polys.push_back(poly_from_json(j));
  }
  if (polys.empty()) throw ValidationError("no polynomials given");
  for (auto& p : polys) F.components.push_back(Eigenfunction::from_poly(std::move(p)));
  F.validate_centered();
  return F;
}

RationalMatrix sigma_from_arg(const std::string& arg) {
  if (std::filesystem::exists(arg)) return matrix_from_json(read_json_file(arg));
  return matrix_from_json(nlohmann::json(arg));
}

// {"sigma": ..., "mu": [...]} for a Gaussian, or a polynomial file for a chaos sample.
SampleSource source_from_spec(const nlohmann::json& j) {
  if (j.contains("sigma")) {
    const ComplexMatrix sigma = to_eigen(matrix_from_json(j.at("sigma")));
    ComplexVector mu = ComplexVector::Zero(sigma.rows());
    if (j.contains("mu")) {
      const auto& m = j.at("mu");
      if (m.size() != static_cast<std::size_t>(sigma.rows())) throw ValidationError("mu has the wrong length");
      for (std::size_t i = 0; i < m.size(); ++i) mu(static_cast<Eigen::Index>(i)) = complex_from_json(m[i]).to_complex();
    }
    return gaussian_source(GaussianSpec(mu, sigma));
  }
  return chaos_source(chaotic_vector_from_json(j));
}

nlohmann::json envelope(const std::string& command, std::uint64_t seed, const std::string& input_hash) {
  return {{"schema_version", kSchemaVersion},
          {"tool", "cwchaos"},
          {"version", library_version()},
          {"command", command},
          {"seed", seed},
          {"input_hash", input_hash}};
}

void emit(const GlobalOptions& g, const std::string& command, const nlohmann::json& doc) {
  if (g.out.empty()) {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::filesystem::create_directories(g.out);
  const auto path = std::filesystem::path(g.out) / (command + ".json");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << doc.dump(2) << '\n';
  std::cerr << "wrote " << path.string() << '\n';
}

int cmd_moments(const GlobalOptions& g, const std::string& poly_path, std::size_t mc) {
  const nlohmann::json input = read_json_file(poly_path);
  const ChaoticVector F = chaotic_vector_from_json(input);
  const std::uint64_t seed = g.seed.value_or(1);
  nlohmann::json doc = envelope("moments", seed, fnv1a(input.dump()));
  doc["exact"] = to_json(to_summary(exact_moments(F, true)));
  if (mc > 0) doc["mc"] = to_json(mc_moments(F, mc, seed, g.threads));
  emit(g, "moments", doc);
  return 0;
}

int cmd_bound(const GlobalOptions& g, const std::string& poly_path, const std::string& sigma_arg, std::size_t mc,
              std::size_t w1_n, std::size_t w1_repeats) {
  const nlohmann::json input = read_json_file(poly_path);
  const ChaoticVector F = chaotic_vector_from_json(input);
  const RationalMatrix sigma = sigma_from_arg(sigma_arg);
  if (sigma.dim() != F.dim()) throw ValidationError("sigma dimension does not match the number of polynomials");
  const std::uint64_t seed = g.seed.value_or(1);
  nlohmann::json doc = envelope("bound", seed, fnv1a(input.dump() + matrix_to_json(sigma).dump()));
  BoundReport r = thm1_bound_exact(F, sigma);
  r.n_label = "1";
  const ComplexMatrix sig = to_eigen(sigma);
  if (w1_n > 0) {
    const DwEstimate e = estimate_dw(chaos_source(F), GaussianSpec::centered(sig), w1_n, w1_repeats,
                                     derive_seed(seed, 0x5731), g.threads);
    r.empirical_w1 = e.mean;
    r.w1_se = e.std_error;
  }
  doc["report"] = to_json(r);
  if (mc > 0) {
    const MomentSummary m = mc_moments(F, mc, derive_seed(seed, 0x4d43), g.threads);
    try {
      doc["mc"] = to_json(thm4_bound(m, sig));
    } catch (const std::domain_error& e) {
      doc["mc"] = {{"note", std::string("Monte Carlo bound unavailable: ") + e.what()}};
    }
  }
  emit(g, "bound", doc);
  return 0;
}

int cmd_wasserstein(const GlobalOptions& g, const std::string& a, const std::string& b, const std::string& a_spec,
                    const std::string& b_spec, std::size_t n, std::size_t repeats, double eps) {
  const std::uint64_t seed = g.seed.value_or(1);
  nlohmann::json doc;
  if (!a.empty() || !b.empty()) {
    if (a.empty() || b.empty()) throw ValidationError("--a and --b must be given together");
    auto load = [](const std::string& path) {
      std::ifstream in(path);
      if (!in) throw ValidationError("cannot open " + path);
      try {
        return read_samples_csv(in);
      } catch (const std::runtime_error& e) {
        throw ValidationError(path + ": " + e.what());
      }
    };
    SampleMatrix xs = load(a), ys = load(b);
    std::ifstream fa(a), fb(b);
    std::string ta((std::istreambuf_iterator<char>(fa)), {}), tb((std::istreambuf_iterator<char>(fb)), {});
    doc = envelope("wasserstein", seed, fnv1a(ta + '\n' + tb));
    const TransportProblem problem(std::move(xs), std::move(ys), g.threads);
    const TransportResult r =
        problem.size() <= kExactTransportCap ? w1_exact(problem) : w1_sinkhorn(problem, eps);
    doc["n"] = problem.size();
    doc["result"] = to_json(r);
  } else {
    if (a_spec.empty() || b_spec.empty()) throw ValidationError("give --a/--b sample files or --a-spec/--b-spec");
    const nlohmann::json ja = read_json_file(a_spec), jb = read_json_file(b_spec);
    doc = envelope("wasserstein", seed, fnv1a(ja.dump() + '\n' + jb.dump()));
    doc["estimate"] = to_json(estimate_dw(source_from_spec(ja), source_from_spec(jb), n, repeats, seed, g.threads, eps));
  }
  emit(g, "wasserstein", doc);
  return 0;
}

int cmd_stein_check(const GlobalOptions& g, std::size_t samples) {
  SteinSolverConfig cfg;
  cfg.mc_samples = samples;
  cfg.seed = g.seed.value_or(1);
  cfg.threads = g.threads;
  cfg.validate();
  const SteinBattery b = run_stein_battery(cfg);
  nlohmann::json doc = envelope("stein-check", cfg.seed, fnv1a(std::to_string(samples)));
  doc["battery"] = to_json(b);
  emit(g, "stein-check", doc);
  std::cerr << "semigroup " << (b.semigroup_passed() ? "pass" : "FAIL") << ", residuals "
            << (b.residuals_passed() ? "pass" : "FAIL") << ", hessian bounds " << (b.hessian_passed() ? "pass" : "FAIL")
            << '\n';
  return b.passed() ? 0 : kExitInvariant;
}

int cmd_verify(const GlobalOptions& g) {
  IdentitySuiteConfig cfg;
  cfg.seed = g.seed.value_or(1);
  const auto suites = run_identity_suite(cfg);
  nlohmann::json doc = envelope("verify", cfg.seed, fnv1a("identity-suite"));
  nlohmann::json arr = nlohmann::json::array();
  std::size_t passed = 0, failed = 0;
  bool ok = true;
  for (const auto& s : suites) {
    arr.push_back(to_json(s));
    passed += s.passed;
    failed += s.failed;
    ok = ok && s.ok();
    std::fprintf(stderr, "%-26s %6zu passed %4zu failed  %.2fs\n", s.name.c_str(), s.passed, s.failed, s.seconds);
  }
  doc["suites"] = arr;
  doc["passed"] = passed;
  doc["failed"] = failed;
  emit(g, "verify", doc);
  return ok ? 0 : kExitInvariant;
}

int cmd_run(const GlobalOptions& g) {
  if (g.config.empty()) throw ValidationError("run needs --config");
  ExperimentConfig cfg = ExperimentConfig::from_json(read_json_file(g.config));
  if (g.seed) cfg.seed = *g.seed;
  if (!g.out.empty()) cfg.output_dir = g.out;
  const ExperimentResult res = run_experiment(cfg, g.threads);
  for (const auto& path : write_experiment_outputs(res, cfg.output_dir)) std::cerr << "wrote " << path << '\n';
  for (const auto& c : res.invariants)
    if (!c.passed) std::cerr << "invariant " << c.name << " failed at n=" << c.n << " " << c.detail << '\n';
  return res.passed() ? 0 : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cwchaos: complex Wiener chaos, Stein bounds and empirical Wasserstein distances"};
  app.set_version_flag("--version", library_version());
  app.require_subcommand(1);

  GlobalOptions g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides the config)");
  app.add_option("--config", g.config, "experiment config (JSON)");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--threads", g.threads, "worker threads, 0 = hardware concurrency");
  for (auto* opt : {seed_opt, app.get_option("--config"), app.get_option("--out"), app.get_option("--threads")})
    opt->configurable(false);
  app.fallthrough();

  std::string poly, sigma, a, b, a_spec, b_spec;
  std::size_t mc = 0, w1_n = 0, w1_repeats = 8, n = 512, repeats = 8, stein_samples = 200000;
  double eps = 1e-2;

  auto* moments = app.add_subcommand("moments", "exact (and optional Monte Carlo) moments of a polynomial vector");
  moments->add_option("--poly", poly, "polynomial JSON file")->required();
  moments->add_option("--mc", mc, "Monte Carlo samples (0 = off)");

  auto* bound = app.add_subcommand("bound", "Gamma-integral and fourth-moment bounds for a polynomial vector");
  bound->add_option("--poly", poly, "polynomial JSON file")->required();
  bound->add_option("--sigma", sigma, "target covariance: JSON file or a rational")->required();
  bound->add_option("--mc", mc, "Monte Carlo samples for the moment route (0 = off)");
  bound->add_option("--w1-n", w1_n, "empirical W1 sample size (0 = off)");
  bound->add_option("--w1-repeats", w1_repeats, "empirical W1 repeats");

  auto* wass = app.add_subcommand("wasserstein", "empirical W1 between sample files or sampler specs");
  wass->add_option("--a", a, "sample CSV");
  wass->add_option("--b", b, "sample CSV");
  wass->add_option("--a-spec", a_spec, "sampler JSON: {\"sigma\", \"mu\"} or a polynomial file");
  wass->add_option("--b-spec", b_spec, "sampler JSON");
  wass->add_option("--n", n, "sample size per repeat");
  wass->add_option("--repeats", repeats, "independent repeats");
  wass->add_option("--eps", eps, "Sinkhorn regularization above the exact cap");

  auto* stein = app.add_subcommand("stein-check", "Stein solver battery");
  stein->add_option("--samples", stein_samples, "frozen Monte Carlo sample size");

  auto* verify = app.add_subcommand("verify", "exact identity suite");
  auto* run = app.add_subcommand("run", "run an experiment config");
  for (auto* sub : {moments, bound, wass, stein, verify, run}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  if (*seed_opt) g.seed = seed;

  try {
    if (*moments) return cmd_moments(g, poly, mc);
    if (*bound) return cmd_bound(g, poly, sigma, mc, w1_n, w1_repeats);
    if (*wass) return cmd_wasserstein(g, a, b, a_spec, b_spec, n, repeats, eps);
    if (*stein) return cmd_stein_check(g, stein_samples);
    if (*verify) return cmd_verify(g);
    if (*run) return cmd_run(g);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitUsage;
}
