#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"
#include "nlf/algebra_probes.hpp"
#include "nlf/modular.hpp"
#include "report.hpp"

namespace nlf::cli {

using Runner = Outcome (*)(const ExperimentConfig&);

struct ExperimentEntry {
  const char* name;
  Runner run;
};

// Subcommands in run-all order.
const std::vector<ExperimentEntry>& experiment_registry();
// Throws std::out_of_range for an unknown name.
Runner find_experiment(const std::string& name);

Outcome run_verify_car(const ExperimentConfig& config);
Outcome run_oracle_crosscheck(const ExperimentConfig& config);
Outcome run_relative_locality(const ExperimentConfig& config);
Outcome run_nonlocality_witness(const ExperimentConfig& config);
Outcome run_weak_locality(const ExperimentConfig& config);
Outcome run_bisognano_wichmann(const ExperimentConfig& config);
Outcome run_string_fields(const ExperimentConfig& config);
Outcome run_local_net(const ExperimentConfig& config);

// Working sets shared with the acceptance suite.

// Bumps with random centers in [-2, 2]^d and radii in [0.3, 0.8]; every other one is modulated (complex).
std::vector<TestFunction> random_working_set(int count, std::uint64_t seed, int d);

struct WedgeWords {
  std::vector<TestFunction> right;    // supports in W_R
  std::vector<TestFunction> left;     // supports in W_L
  std::vector<TestFunction> control;  // supports in W_R, for same-wedge controls
};
WedgeWords wedge_words(int d);

struct StringSetup {
  StringField lower, upper;
  std::vector<TestFunction> probes;    // supports in W2
  std::vector<TestFunction> controls;  // supports in W1 outside W2
};
StringSetup string_setup(double a, const ModelConfig& model);

struct NetScanSetup {
  NetScanConfig scan;
  NetRegion region;  // region of the single net element check
};
NetScanSetup default_net_scan(double tol);

CentralSequenceOptions witness_options(const ExperimentConfig& config);

}  // namespace nlf::cli
