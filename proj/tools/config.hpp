#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlf/mass_shell.hpp"

namespace nlf::cli {

using json = nlohmann::json;

constexpr int kSchemaVersion = 1;

struct Tolerances {
  double car = 1e-10;
  double oracle = 1e-9;
  double identity = 1e-10;
  double locality = 1e-5;
  double weak = 1e-6;
  double tomita = 1e-4;
  double string_field = 1e-5;
  double net = 1e-5;
  double klein_gordon = 1e-12;
  double witness = 0.99;       // lower bound on the witness at n_max
  double witness_noise = 1e-3;
  double f1f2 = 0.05;          // distance of <f1|f2> from -i at n_max
};

struct CarParams {
  int functions = 4;
  int klein_gordon_functions = 5;
};

struct OracleParams {
  int functions = 4;
  int max_length = 6;
};

struct WitnessParams {
  int n_max = 16;
  std::optional<std::vector<double>> translation = std::vector<double>{0.0, 3.0};
  double seed_radius = 0.5;
  std::vector<double> probe_center{0.0, -4.0};
  double probe_radius = 0.5;
  double gate_floor = 1e-14;
  bool refine = false;
  double panel_phase = 16.0;
  double theta_max = 7.0;
  double theta_growth = 2.0;
  int base_nodes = 512;
};

struct WeakParams {
  int max_degree = 4;
};

struct BwParams {
  double span = 8.0;
  int count = 1024;
  double window = 4.0;
  double growth_limit = 10.0;
  int padding = 1;
};

struct StringParams {
  double a = 1.0;
};

struct NetParams {
  int degree = 2;
};

struct ExperimentConfig {
  ModelConfig model;
  GridSpec grid{.nodes = 16384, .order = 16, .theta_max = 7.0, .cutoff = 0.0, .grading = 1.0};
  std::uint64_t seed = 20240601;
  std::string tolerance_profile = "default";
  std::string out_dir;  // empty: NLF_OUT_DIR or ./nlf-out
  Tolerances tol;
  CarParams car;
  OracleParams oracle;
  WitnessParams witness;
  WeakParams weak;
  BwParams bw;
  StringParams string_fields;
  NetParams net;

  // Canonical form with every default filled in; the hash is taken over its dump.
  json canonical() const;
  std::string hash() const;
  // Tolerances after the profile is applied: strict divides each residual bound by 10.
  Tolerances effective_tolerances() const;
};

// Parses a YAML document. Throws ConfigurationError listing every schema violation.
ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::string& path);

// 64-bit FNV-1a, lowercase hex.
std::string fnv1a_hex(const std::string& data);

// Human-readable schema of the accepted keys.
std::string schema_description();

}  // namespace nlf::cli
