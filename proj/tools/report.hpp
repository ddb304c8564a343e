#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "config.hpp"
#include "nlf/algebra_probes.hpp"

namespace nlf::cli {

inline constexpr const char* kArtifactVersion = "1.0.0";

struct CsvTable {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct Outcome {
  std::string experiment;
  std::string claim;  // stable identifier of the tested statement
  std::vector<LocalityReport> sections;
  json details = json::object();
  std::vector<CsvTable> plots;
  json timings = json::object();  // seconds per stage; excluded from the body

  bool passed() const;
};

// {"body": ..., "timings": ...}. The body is a pure function of the config and the computation.
json make_report(const Outcome& outcome, const ExperimentConfig& config);

// Writes <dir>/<experiment>.json, or <experiment>.<k>.json for the first unused k.
// CSV tables share the suffix. Returns the report path.
std::string write_outputs(const std::string& dir, const Outcome& outcome, const ExperimentConfig& config);

std::string format_csv(const CsvTable& table);

}  // namespace nlf::cli
