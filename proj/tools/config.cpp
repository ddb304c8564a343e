#include "config.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "nlf/errors.hpp"

namespace nlf::cli {

namespace {

template <class T>
const char* type_name() {
  if constexpr (std::is_same_v<T, int>) return "integer";
  if constexpr (std::is_same_v<T, bool>) return "boolean";
  if constexpr (std::is_same_v<T, std::string>) return "string";
  if constexpr (std::is_same_v<T, std::uint64_t>) return "unsigned integer";
  if constexpr (std::is_same_v<T, std::vector<double>>) return "list of numbers";
  return "number";
}

class Reader {
 public:
  std::vector<std::string> errors;

  // Returns false when the node is absent; records an error when it is not a map.
  bool section(const YAML::Node& parent, const std::string& key, const std::string& path, YAML::Node& out) {
    const YAML::Node n = parent[key];
    if (!n) return false;
    if (!n.IsMap()) {
      errors.push_back(join(path, key) + ": expected a mapping");
      return false;
    }
    out = n;
    return true;
  }

  void allow(const YAML::Node& n, const std::string& path, std::initializer_list<const char*> keys) {
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& kv : n) {
      const std::string k = kv.first.as<std::string>();
      if (!allowed.count(k)) {
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        errors.push_back(join(path, k) + ": unknown key (allowed: " + list + ")");
      }
    }
  }

  template <class T>
  void get(const YAML::Node& n, const std::string& key, const std::string& path, T& out) {
    const YAML::Node v = n[key];
    if (!v) return;
    try {
      out = v.as<T>();
    } catch (const YAML::Exception&) {
      errors.push_back(join(path, key) + ": expected " + type_name<T>());
    }
  }

  void require(bool ok, const std::string& where, const std::string& what) {
    if (!ok) errors.push_back(where + ": " + what);
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
};

void read_experiments(Reader& r, const YAML::Node& ex, ExperimentConfig& c) {
  const std::string p = "experiments";
  r.allow(ex, p,
          {"verify-car", "oracle-crosscheck", "relative-locality", "nonlocality-witness", "weak-locality",
           "bisognano-wichmann", "string-fields", "local-net"});
  YAML::Node n;
  if (r.section(ex, "verify-car", p, n)) {
    const std::string q = p + ".verify-car";
    r.allow(n, q, {"functions", "klein_gordon_functions"});
    r.get(n, "functions", q, c.car.functions);
    r.get(n, "klein_gordon_functions", q, c.car.klein_gordon_functions);
  }
  if (r.section(ex, "oracle-crosscheck", p, n)) {
    const std::string q = p + ".oracle-crosscheck";
    r.allow(n, q, {"functions", "max_length"});
    r.get(n, "functions", q, c.oracle.functions);
    r.get(n, "max_length", q, c.oracle.max_length);
  }
  if (r.section(ex, "relative-locality", p, n)) r.allow(n, p + ".relative-locality", {});
  if (r.section(ex, "nonlocality-witness", p, n)) {
    const std::string q = p + ".nonlocality-witness";
    r.allow(n, q,
            {"n_max", "translation", "seed_radius", "probe_center", "probe_radius", "gate_floor", "refine",
             "panel_phase", "theta_max", "theta_growth", "base_nodes"});
    WitnessParams& w = c.witness;
    r.get(n, "n_max", q, w.n_max);
    if (n["translation"]) {
      if (n["translation"].IsNull() ||
          (n["translation"].IsScalar() && n["translation"].as<std::string>() == "lattice")) {
        w.translation.reset();
      } else {
        std::vector<double> a;
        r.get(n, "translation", q, a);
        w.translation = a;
      }
    }
    r.get(n, "seed_radius", q, w.seed_radius);
    r.get(n, "probe_center", q, w.probe_center);
    r.get(n, "probe_radius", q, w.probe_radius);
    r.get(n, "gate_floor", q, w.gate_floor);
    r.get(n, "refine", q, w.refine);
    r.get(n, "panel_phase", q, w.panel_phase);
    r.get(n, "theta_max", q, w.theta_max);
    r.get(n, "theta_growth", q, w.theta_growth);
    r.get(n, "base_nodes", q, w.base_nodes);
  }
  if (r.section(ex, "weak-locality", p, n)) {
    const std::string q = p + ".weak-locality";
    r.allow(n, q, {"max_degree"});
    r.get(n, "max_degree", q, c.weak.max_degree);
  }
  if (r.section(ex, "bisognano-wichmann", p, n)) {
    const std::string q = p + ".bisognano-wichmann";
    r.allow(n, q, {"span", "count", "window", "growth_limit", "padding"});
    r.get(n, "span", q, c.bw.span);
    r.get(n, "count", q, c.bw.count);
    r.get(n, "window", q, c.bw.window);
    r.get(n, "growth_limit", q, c.bw.growth_limit);
    r.get(n, "padding", q, c.bw.padding);
  }
  if (r.section(ex, "string-fields", p, n)) {
    const std::string q = p + ".string-fields";
    r.allow(n, q, {"a"});
    r.get(n, "a", q, c.string_fields.a);
  }
  if (r.section(ex, "local-net", p, n)) {
    const std::string q = p + ".local-net";
    r.allow(n, q, {"degree"});
    r.get(n, "degree", q, c.net.degree);
  }
}

void validate(Reader& r, const ExperimentConfig& c) {
  r.require(c.model.d >= 2 && c.model.d <= 4, "model.d", "must be 2, 3 or 4");
  r.require(c.model.m > 0.0, "model.m", "must be positive");
  r.require(c.grid.nodes >= 8, "grid.nodes", "must be at least 8");
  r.require(c.grid.order >= 2 && c.grid.order <= 64, "grid.order", "must lie in [2, 64]");
  r.require(c.grid.nodes <= c.grid.order || c.grid.nodes % c.grid.order == 0, "grid.nodes",
            "must be a multiple of grid.order");
  r.require(c.grid.theta_max > 0.0, "grid.theta_max", "must be positive");
  r.require(c.grid.grading >= 0.0, "grid.grading", "must be nonnegative");
  r.require(c.grid.cutoff >= 0.0, "grid.cutoff", "must be nonnegative");
  r.require(c.tolerance_profile == "default" || c.tolerance_profile == "strict", "tolerance_profile",
            "must be 'default' or 'strict'");
  r.require(c.car.functions >= 1 && c.car.functions <= 6, "experiments.verify-car.functions", "must lie in [1, 6]");
  r.require(c.car.klein_gordon_functions >= 1, "experiments.verify-car.klein_gordon_functions", "must be positive");
  r.require(c.oracle.functions >= 1 && c.oracle.functions <= 6, "experiments.oracle-crosscheck.functions",
            "must lie in [1, 6]");
  r.require(c.oracle.max_length >= 0 && c.oracle.max_length <= 8, "experiments.oracle-crosscheck.max_length",
            "must lie in [0, 8]");
  const WitnessParams& w = c.witness;
  r.require(w.n_max >= 1, "experiments.nonlocality-witness.n_max", "must be positive");
  r.require(!w.translation || static_cast<int>(w.translation->size()) == c.model.d,
            "experiments.nonlocality-witness.translation", "must have d components");
  r.require(static_cast<int>(w.probe_center.size()) == c.model.d, "experiments.nonlocality-witness.probe_center",
            "must have d components");
  r.require(w.seed_radius > 0.0 && w.seed_radius <= 0.5, "experiments.nonlocality-witness.seed_radius",
            "must lie in (0, 0.5]");
  r.require(w.probe_radius > 0.0, "experiments.nonlocality-witness.probe_radius", "must be positive");
  r.require(w.panel_phase > 0.0 && w.theta_max > 0.0 && w.theta_growth >= 0.0 && w.base_nodes >= 16,
            "experiments.nonlocality-witness", "grid parameters out of range");
  r.require(c.weak.max_degree >= 0 && c.weak.max_degree <= 4, "experiments.weak-locality.max_degree",
            "must lie in [0, 4]");
  r.require(c.bw.span > 0.0 && c.bw.count >= 16 && c.bw.window > 0.0 && c.bw.growth_limit > 0.0 && c.bw.padding >= 1,
            "experiments.bisognano-wichmann", "parameters out of range");
  r.require(c.string_fields.a > 0.0, "experiments.string-fields.a", "must be positive");
  r.require(c.net.degree >= 0 && c.net.degree <= 6, "experiments.local-net.degree", "must lie in [0, 6]");
}

}  // namespace

ExperimentConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigurationError(std::string("config: YAML syntax error: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigurationError("config: top level must be a mapping");

  Reader r;
  ExperimentConfig c;
  r.allow(root, "",
          {"schema_version", "model", "grid", "seed", "tolerance_profile", "output", "tolerances", "experiments"});
  if (!root["schema_version"]) {
    r.errors.push_back("schema_version: missing (expected " + std::to_string(kSchemaVersion) + ")");
  } else {
    int v = 0;
    r.get(root, "schema_version", "", v);
    if (v != kSchemaVersion) r.errors.push_back("schema_version: unsupported version " + std::to_string(v));
  }
  YAML::Node n;
  if (r.section(root, "model", "", n)) {
    r.allow(n, "model", {"d", "m"});
    r.get(n, "d", "model", c.model.d);
    r.get(n, "m", "model", c.model.m);
  }
  if (r.section(root, "grid", "", n)) {
    r.allow(n, "grid", {"nodes", "order", "theta_max", "cutoff", "grading"});
    r.get(n, "nodes", "grid", c.grid.nodes);
    r.get(n, "order", "grid", c.grid.order);
    r.get(n, "theta_max", "grid", c.grid.theta_max);
    r.get(n, "cutoff", "grid", c.grid.cutoff);
    r.get(n, "grading", "grid", c.grid.grading);
  }
  r.get(root, "seed", "", c.seed);
  r.get(root, "tolerance_profile", "", c.tolerance_profile);
  if (r.section(root, "output", "", n)) {
    r.allow(n, "output", {"dir"});
    r.get(n, "dir", "output", c.out_dir);
  }
  if (r.section(root, "tolerances", "", n)) {
    const std::string q = "tolerances";
    r.allow(n, q,
            {"car", "oracle", "identity", "locality", "weak", "tomita", "string_field", "net", "klein_gordon",
             "witness", "witness_noise", "f1f2"});
    Tolerances& t = c.tol;
    r.get(n, "car", q, t.car);
    r.get(n, "oracle", q, t.oracle);
    r.get(n, "identity", q, t.identity);
    r.get(n, "locality", q, t.locality);
    r.get(n, "weak", q, t.weak);
    r.get(n, "tomita", q, t.tomita);
    r.get(n, "string_field", q, t.string_field);
    r.get(n, "net", q, t.net);
    r.get(n, "klein_gordon", q, t.klein_gordon);
    r.get(n, "witness", q, t.witness);
    r.get(n, "witness_noise", q, t.witness_noise);
    r.get(n, "f1f2", q, t.f1f2);
  }
  if (r.section(root, "experiments", "", n)) read_experiments(r, n, c);
  validate(r, c);

  if (!r.errors.empty()) {
    std::ostringstream os;
    os << "config: " << r.errors.size() << " schema violation(s)";
    for (const auto& e : r.errors) os << "\n  " << e;
    throw ConfigurationError(os.str());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

json ExperimentConfig::canonical() const {
  const Tolerances& t = tol;
  json witness_json = {{"n_max", witness.n_max},
                       {"translation", witness.translation ? json(*witness.translation) : json("lattice")},
                       {"seed_radius", witness.seed_radius},
                       {"probe_center", witness.probe_center},
                       {"probe_radius", witness.probe_radius},
                       {"gate_floor", witness.gate_floor},
                       {"refine", witness.refine},
                       {"panel_phase", witness.panel_phase},
                       {"theta_max", witness.theta_max},
                       {"theta_growth", witness.theta_growth},
                       {"base_nodes", witness.base_nodes}};
  return {{"schema_version", kSchemaVersion},
          {"model", {{"d", model.d}, {"m", model.m}}},
          {"grid",
           {{"nodes", grid.nodes},
            {"order", grid.order},
            {"theta_max", grid.theta_max},
            {"cutoff", grid.cutoff},
            {"grading", grid.grading}}},
          {"seed", seed},
          {"tolerance_profile", tolerance_profile},
          {"tolerances",
           {{"car", t.car},
            {"oracle", t.oracle},
            {"identity", t.identity},
            {"locality", t.locality},
            {"weak", t.weak},
            {"tomita", t.tomita},
            {"string_field", t.string_field},
            {"net", t.net},
            {"klein_gordon", t.klein_gordon},
            {"witness", t.witness},
            {"witness_noise", t.witness_noise},
            {"f1f2", t.f1f2}}},
          {"experiments",
           {{"verify-car", {{"functions", car.functions}, {"klein_gordon_functions", car.klein_gordon_functions}}},
            {"oracle-crosscheck", {{"functions", oracle.functions}, {"max_length", oracle.max_length}}},
            {"relative-locality", json::object()},
            {"nonlocality-witness", witness_json},
            {"weak-locality", {{"max_degree", weak.max_degree}}},
            {"bisognano-wichmann",
             {{"span", bw.span},
              {"count", bw.count},
              {"window", bw.window},
              {"growth_limit", bw.growth_limit},
              {"padding", bw.padding}}},
            {"string-fields", {{"a", string_fields.a}}},
            {"local-net", {{"degree", net.degree}}}}}};
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(canonical().dump()); }

Tolerances ExperimentConfig::effective_tolerances() const {
  Tolerances t = tol;
  if (tolerance_profile == "strict") {
    for (double* v : {&t.car, &t.oracle, &t.identity, &t.locality, &t.weak, &t.tomita, &t.string_field, &t.net,
                      &t.klein_gordon, &t.witness_noise, &t.f1f2})
      *v /= 10.0;
  }
  return t;
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string schema_description() {
  return ExperimentConfig{}.canonical().dump(2);
}

}  // namespace nlf::cli
