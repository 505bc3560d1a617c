#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "srm/config.hpp"

namespace srm {

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

struct Assertion {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct RunResult {
  std::string experiment;
  std::vector<Table> tables;
  std::vector<Assertion> assertions;
  std::map<std::string, double> thresholds;  ///< effective values
  std::map<std::string, double> params;

  [[nodiscard]] bool passed() const;
};

struct ExperimentInfo {
  std::string name;
  std::string summary;
  std::string assertions;  ///< what the exit status certifies
  std::vector<int> degrees;
  std::vector<CatalogEntry> metrics;
  std::map<std::string, double> thresholds;
  std::map<std::string, double> params;
};

const std::vector<ExperimentInfo>& experiment_list();
/// Throws Error(Config) for unknown names.
const ExperimentInfo& describe_experiment(const std::string& name);
std::string describe_text(const ExperimentInfo& info);

/// Runs `name` with `config` layered over the experiment defaults.
RunResult run_experiment(const std::string& name, const ExperimentConfig& config);

/// Writes one CSV per table plus manifest.json; returns the manifest text.
std::string write_outputs(const RunResult& result, const ExperimentConfig& config, const std::filesystem::path& dir);

/// Full-precision, locale-independent rendering of a CSV cell.
std::string format_cell(const Cell& c);

inline constexpr const char* kVersion = "srm 0.1.0";

}  // namespace srm
