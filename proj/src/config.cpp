#include "srm/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace srm {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorKind::Config, msg); }

void reject_unknown(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& where) {
  if (!node.IsMap()) fail(where + " must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& where) {
  if (!node.IsScalar()) fail(where + " must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail("malformed value for " + where + ": '" + node.Scalar() + "'");
  }
}

std::map<std::string, double> number_map(const YAML::Node& node, const std::string& where) {
  if (!node.IsMap()) fail(where + " must be a mapping");
  std::map<std::string, double> out;
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    out[key] = scalar<double>(kv.second, where + "." + key);
  }
  return out;
}

QuadratureKind quadrature_kind(const std::string& s) {
  if (s == "auto") return QuadratureKind::Auto;
  if (s == "exact-toric") return QuadratureKind::ExactToric;
  if (s == "chart-2d") return QuadratureKind::Chart2D;
  fail("unknown quadrature kind '" + s + "'");
}

const char* quadrature_kind_name(QuadratureKind k) {
  switch (k) {
    case QuadratureKind::Auto: return "auto";
    case QuadratureKind::ExactToric: return "exact-toric";
    case QuadratureKind::Chart2D: return "chart-2d";
  }
  return "auto";
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    fail(std::string("YAML parse error: ") + e.what());
  }
  ExperimentConfig c;
  if (root.IsNull()) return c;
  reject_unknown(root, {"experiment", "seed", "degrees", "kmax", "metrics", "quadrature", "thresholds", "params"},
                 "config");
  if (root["experiment"]) c.experiment = scalar<std::string>(root["experiment"], "experiment");
  if (root["seed"]) c.seed = scalar<std::uint64_t>(root["seed"], "seed");
  if (root["degrees"]) {
    if (!root["degrees"].IsSequence()) fail("degrees must be a list");
    for (const auto& d : root["degrees"]) {
      const int k = scalar<int>(d, "degrees[]");
      if (k < 0) fail("degrees must be non-negative");
      c.degrees.push_back(k);
    }
  }
  if (root["kmax"]) {
    c.kmax = scalar<int>(root["kmax"], "kmax");
    if (*c.kmax < 1) fail("kmax must be positive");
  }
  if (root["metrics"]) {
    if (!root["metrics"].IsSequence()) fail("metrics must be a list");
    for (const auto& m : root["metrics"]) {
      reject_unknown(m, {"name", "type", "parameters"}, "metrics[]");
      CatalogEntry e;
      if (!m["type"]) fail("metrics[] entry needs a type");
      e.type = scalar<std::string>(m["type"], "metrics[].type");
      e.name = m["name"] ? scalar<std::string>(m["name"], "metrics[].name") : e.type;
      if (m["parameters"]) {
        if (!m["parameters"].IsSequence()) fail("metrics[].parameters must be a list");
        for (const auto& p : m["parameters"]) e.parameters.push_back(scalar<double>(p, "metrics[].parameters[]"));
      }
      make_metric(e);  // validates type and parameters early
      c.metrics.push_back(e);
    }
  }
  if (root["quadrature"]) {
    const YAML::Node q = root["quadrature"];
    reject_unknown(q, {"kind", "radial", "angular", "tolerance", "accept"}, "quadrature");
    if (q["kind"]) c.quadrature.kind = quadrature_kind(scalar<std::string>(q["kind"], "quadrature.kind"));
    if (q["radial"]) c.quadrature.radial = scalar<int>(q["radial"], "quadrature.radial");
    if (q["angular"]) c.quadrature.angular = scalar<int>(q["angular"], "quadrature.angular");
    if (q["tolerance"]) c.quadrature.tolerance = scalar<double>(q["tolerance"], "quadrature.tolerance");
    if (q["accept"]) c.quadrature.accept = scalar<double>(q["accept"], "quadrature.accept");
  }
  if (root["thresholds"]) c.thresholds = number_map(root["thresholds"], "thresholds");
  if (root["params"]) c.params = number_map(root["params"], "params");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_config(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["experiment"] = c.experiment;
  j["seed"] = c.seed;
  j["degrees"] = c.degrees;
  j["kmax"] = c.kmax ? nlohmann::ordered_json(*c.kmax) : nlohmann::ordered_json(nullptr);
  auto metrics = nlohmann::ordered_json::array();
  for (const auto& m : c.metrics) metrics.push_back({{"name", m.name}, {"type", m.type}, {"parameters", m.parameters}});
  j["metrics"] = metrics;
  j["quadrature"] = {{"kind", quadrature_kind_name(c.quadrature.kind)},
                     {"radial", c.quadrature.radial},
                     {"angular", c.quadrature.angular},
                     {"tolerance", c.quadrature.tolerance},
                     {"accept", c.quadrature.accept}};
  j["thresholds"] = c.thresholds;
  j["params"] = c.params;
  return j.dump();
}

std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : canonical_config(c)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace srm
