#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "srm/experiments.hpp"

namespace {

int run(const std::string& name, const std::string& config_path, const std::string& out_dir,
        std::optional<std::uint64_t> seed, std::optional<int> kmax) {
  srm::ExperimentConfig cfg;
  if (!config_path.empty()) cfg = srm::load_config(config_path);
  if (seed) cfg.seed = *seed;
  if (kmax) {
    if (*kmax < 1) throw srm::Error(srm::ErrorKind::Config, "--kmax must be positive");
    cfg.kmax = kmax;
  }
  const srm::RunResult r = srm::run_experiment(name, cfg);
  srm::write_outputs(r, cfg, out_dir);
  int failed = 0;
  for (const auto& a : r.assertions) {
    std::printf("%s %s value=%s threshold=%s%s%s\n", a.passed ? "PASS" : "FAIL", a.name.c_str(),
                srm::format_cell(a.value).c_str(), srm::format_cell(a.threshold).c_str(), a.detail.empty() ? "" : "  # ",
                a.detail.c_str());
    failed += !a.passed;
  }
  std::printf("%s: %d/%zu assertions passed, outputs in %s\n", name.c_str(),
              static_cast<int>(r.assertions.size()) - failed, r.assertions.size(), out_dir.c_str());
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metric calculus on section rings of the projective line"};
  app.set_version_flag("--version", srm::kVersion);
  std::string command, target, config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> kmax;
  app.add_option("experiment", command, "experiment name, or `list` / `describe <name>`")->required();
  app.add_option("name", target, "experiment to describe");
  app.add_option("--config", config_path, "YAML configuration")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "random seed override");
  app.add_option("--kmax", kmax, "drop degrees above this");
  CLI11_PARSE(app, argc, argv);

  try {
    if (command == "list") {
      for (const auto& e : srm::experiment_list()) std::printf("%-22s %s\n", e.name.c_str(), e.summary.c_str());
      return 0;
    }
    if (command == "describe") {
      if (target.empty()) throw srm::Error(srm::ErrorKind::Config, "describe needs an experiment name");
      std::fputs(srm::describe_text(srm::describe_experiment(target)).c_str(), stdout);
      return 0;
    }
    if (!target.empty()) throw srm::Error(srm::ErrorKind::Config, "unexpected argument '" + target + "'");
    srm::describe_experiment(command);
    if (out_dir.empty()) throw srm::Error(srm::ErrorKind::Config, "--out is required");
    return run(command, config_path, out_dir, seed, kmax);
  } catch (const srm::Error& e) {
    std::cerr << "{\"error\":\"" << srm::to_string(e.kind()) << "\",\"experiment\":\"" << command
              << "\",\"message\":" << nlohmann::json(e.what()).dump() << "}\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "{\"error\":\"internal\",\"message\":" << nlohmann::json(e.what()).dump() << "}\n";
    return 3;
  }
}
