#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "srm/experiments.hpp"

using namespace srm;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("registry") {
  CHECK(experiment_list().size() == 14);
  CHECK(describe_text(describe_experiment("fekete")).find("fekete") == 0);
  CHECK_THROWS_AS(describe_experiment("nope"), Error);
  for (const ExperimentInfo& e : experiment_list()) {
    const std::string text = describe_text(e);
    CHECK(text.find("asserts:") != std::string::npos);
  }
}

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(R"(
experiment: gram-golden
seed: 9
degrees: [1, 2, 3]
kmax: 2
metrics:
  - {name: r, type: ramp, parameters: [0.2]}
quadrature: {kind: exact-toric, radial: 40}
thresholds: {rel_tol: 1.0e-9}
)");
  CHECK(c.experiment == "gram-golden");
  CHECK(c.seed == 9);
  CHECK(c.degrees.size() == 3);
  CHECK(*c.kmax == 2);
  CHECK(c.metrics.at(0).parameters.at(0) == doctest::Approx(0.2));
  CHECK(c.quadrature.radial == 40);
  CHECK(c.thresholds.at("rel_tol") == doctest::Approx(1e-9));

  CHECK_THROWS_AS(parse_config("bogus: 1"), Error);
  CHECK_THROWS_AS(parse_config("quadrature: {kind: exact-toric, nodes: 3}"), Error);
  CHECK_THROWS_AS(parse_config("metrics: [{type: ramp}]"), Error);
  CHECK_THROWS_AS(parse_config("seed: abc"), Error);
  CHECK_THROWS_AS(parse_config("degrees: [-1]"), Error);
  CHECK(config_hash(parse_config("seed: 1")) == config_hash(parse_config("seed: 1\n")));
  CHECK(config_hash(parse_config("seed: 1")) != config_hash(parse_config("seed: 2")));
}

TEST_CASE("unknown threshold and param overrides are rejected") {
  CHECK_THROWS_AS(run_experiment("gram-golden", parse_config("thresholds: {nope: 1}")), Error);
  CHECK_THROWS_AS(run_experiment("gram-golden", parse_config("params: {nope: 1}")), Error);
  CHECK_THROWS_AS(run_experiment("gram-golden", parse_config("experiment: fekete")), Error);
}

TEST_CASE("kmax filters degrees and overrides are recorded") {
  const RunResult r = run_experiment("gram-golden", parse_config("kmax: 4\nthresholds: {rel_tol: 1.0e-11}"));
  CHECK(r.passed());
  CHECK(r.thresholds.at("rel_tol") == doctest::Approx(1e-11));
  long long top = 0;
  for (const auto& row : r.tables.at(0).rows) top = std::max(top, std::get<long long>(row[1]));
  CHECK(top == 4);
}

TEST_CASE("outputs are deterministic and complete") {
  const ExperimentConfig cfg = parse_config("seed: 3\nparams: {random_tensors: 50}");
  const auto dir = std::filesystem::temp_directory_path() / "srm_test_outputs";
  std::filesystem::remove_all(dir);
  const std::string m1 = write_outputs(run_experiment("tensor-laws", cfg), cfg, dir / "a");
  const std::string m2 = write_outputs(run_experiment("tensor-laws", cfg), cfg, dir / "b");
  CHECK(m1 == m2);
  const auto j = nlohmann::json::parse(m1);
  CHECK(j["experiment"] == "tensor-laws");
  CHECK(j["config_hash"].get<std::string>().size() == 16);
  CHECK(j["passed"] == true);
  for (const auto& t : j["tables"]) {
    const std::string f = t["file"];
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("cells render at full precision") {
  CHECK(format_cell(0.1) == "0.10000000000000001");
  CHECK(format_cell(Cell{7LL}) == "7");
  CHECK(format_cell(1e-300) == "1e-300");
  CHECK(std::stod(format_cell(2.0 / 3.0 * 1e-300)) == 2.0 / 3.0 * 1e-300);
  CHECK(std::stod(format_cell(1.0 / 3.0)) == 1.0 / 3.0);
}
