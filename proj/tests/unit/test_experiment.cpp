#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "cwchaos/experiment.hpp"
#include "cwchaos/poly_json.hpp"
#include "oracles.hpp"

using namespace cwchaos;
using nlohmann::json;
using oracle::q;

namespace {

json sos_config() {
  return json::parse(R"({"name": "sos", "generator": "sum_of_squares", "d": 1,
                         "n_grid": [1, 2, 4, 8], "target_sigma": 2, "seed": 7})");
}

json gc_config() {
  return json::parse(R"({"name": "gc", "generator": "gaussian_control", "d": 2, "n_grid": [1, 3],
                         "target_sigma": [["2", {"re": "1", "im": "1"}], [{"re": "1", "im": "-1"}, "3"]],
                         "seed": 9, "mc_samples": 20000, "w1_sample_size": 64, "w1_repeats": 3})");
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_NOTHROW(ExperimentConfig::from_json(sos_config()));
  auto bad = [](auto mutate) {
    json j = sos_config();
    mutate(j);
    return j;
  };
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad([](json& j) { j.erase("seed"); })), ValidationError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad([](json& j) { j["n_grid"] = {1, 1}; })), ValidationError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad([](json& j) { j["n_grid"] = {0}; })), ValidationError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad([](json& j) { j["generator"] = "brownian"; })), ValidationError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad([](json& j) { j["target_sigma"] = -1; })), ValidationError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad([](json& j) { j["d"] = 2; })), ValidationError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad([](json& j) { j["name"] = "a/b"; })), ValidationError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad([](json& j) { j["mc_samples"] = 1; })), ValidationError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad([](json& j) { j["generator"] = "custom_polynomial"; })),
                  ValidationError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json::array()), ValidationError);
}

TEST_CASE("config hash ignores the output directory") {
  ExperimentConfig a = ExperimentConfig::from_json(sos_config());
  ExperimentConfig b = a;
  b.output_dir = "/elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b.seed = 8;
  CHECK(config_hash(a) != config_hash(b));
  const ExperimentConfig c = ExperimentConfig::from_json(a.to_json());
  CHECK(config_hash(c) == config_hash(a));
}

TEST_CASE("sequence generators") {
  const ChaoticVector s = sum_of_squares(3, 2);
  CHECK(s.dim() == 2);
  CHECK(s.num_vars() == 6);
  CHECK(s.scale_sq == q(1, 3));
  for (const auto& c : s.components) CHECK(c.eigenvalue() == 2);

  const RationalMatrix sigma = ExperimentConfig::from_json(gc_config()).target_sigma;
  const ChaoticVector g = gaussian_control(sigma, 2);
  CHECK(g.num_vars() == 4);
  const ExactMoments m = exact_moments(g);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t k = 0; k < 2; ++k) CHECK(m.second_at(j, k) == sigma(j, k));

  RationalMatrix irrational(2);
  irrational(0, 0) = 2;
  irrational(0, 1) = RationalComplex(1, 1);
  irrational(1, 0) = RationalComplex(1, -1);
  irrational(1, 1) = 2;
  CHECK_THROWS_AS(gaussian_control(irrational), ValidationError);
}

TEST_CASE("sum of squares experiment") {
  const ExperimentResult r = run_experiment(ExperimentConfig::from_json(sos_config()), 2);
  CHECK(r.passed());
  REQUIRE(r.points.size() == 4);
  CHECK(r.points[0].report.psi3 == doctest::Approx(16.0));
  CHECK(r.points[3].report.psi3 == doctest::Approx(2.0));
  REQUIRE(r.cor3);
  CHECK(r.cor3->monotone);
  CHECK_FALSE(r.peccati_tudor);
  const std::string csv = r.csv();
  CHECK(csv.rfind("# sos schema_version=1", 0) == 0);
  CHECK(csv.find("\nn,psi1,psi2,psi3,thm4_bound,thm1_bound,empirical_w1,w1_se\n") != std::string::npos);
}

TEST_CASE("results do not depend on the thread count") {
  const ExperimentConfig cfg = ExperimentConfig::from_json(gc_config());
  const ExperimentResult a = run_experiment(cfg, 1), b = run_experiment(cfg, 4);
  CHECK(a.csv() == b.csv());
  CHECK(a.to_json().dump() == b.to_json().dump());
  CHECK(a.passed());
  for (const auto& p : a.points) {
    CHECK(p.report.thm4_bound == 0);
    REQUIRE(p.w1);
    CHECK(p.w1->values.size() == 3);
  }
  REQUIRE(a.peccati_tudor);
}

TEST_CASE("outputs are written under the config name") {
  const auto dir = std::filesystem::temp_directory_path() / "cwchaos_experiment_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const ExperimentResult r = run_experiment(ExperimentConfig::from_json(sos_config()), 1);
  const auto paths = write_experiment_outputs(r, dir.string());
  REQUIRE(paths.size() == 2);
  std::ifstream in(dir / "sos.json");
  const json j = json::parse(in);
  CHECK(j.at("schema_version") == kSchemaVersion);
  std::filesystem::remove_all(dir);
}

TEST_CASE("custom polynomial generator") {
  json j = sos_config();
  j["generator"] = "custom_polynomial";
  j["polynomials"] = json::array({poly_to_json(CWPoly::z(1, 0) * CWPoly::z(1, 0))});
  j["n_grid"] = {1};
  const ExperimentResult r = run_experiment(ExperimentConfig::from_json(j));
  REQUIRE(r.points.size() == 1);
  CHECK(std::abs(r.points[0].report.thm4_bound - 3.8637033051562732) < 1e-12);
  CHECK_FALSE(r.cor3);
}
