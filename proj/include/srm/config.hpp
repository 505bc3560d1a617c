#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "srm/geometry.hpp"

namespace srm {

/// Parsed experiment configuration. Empty collections mean "use the
/// experiment defaults"; thresholds and params override named defaults.
struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 1;
  std::vector<int> degrees;
  std::optional<int> kmax;
  std::vector<CatalogEntry> metrics;
  QuadratureScheme quadrature;
  std::map<std::string, double> thresholds;
  std::map<std::string, double> params;
};

/// YAML text to config; unknown keys and malformed values raise Error(Config).
ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON rendering (sorted keys, full precision) used for hashing.
std::string canonical_config(const ExperimentConfig& c);
/// FNV-1a 64 of the canonical rendering, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

}  // namespace srm
