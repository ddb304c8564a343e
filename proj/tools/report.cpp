#include "report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>

#include "nlf/errors.hpp"

namespace nlf::cli {

namespace fs = std::filesystem;

bool Outcome::passed() const {
  for (const LocalityReport& r : sections)
    if (!r.passed()) return false;
  return true;
}

json make_report(const Outcome& outcome, const ExperimentConfig& config) {
  json sections = json::array();
  for (const LocalityReport& r : outcome.sections) sections.push_back(r.to_json());
  json body = {{"artifact_version", kArtifactVersion},
               {"experiment", outcome.experiment},
               {"claim", outcome.claim},
               {"config_hash", config.hash()},
               {"seed", config.seed},
               {"tolerance_profile", config.tolerance_profile},
               {"passed", outcome.passed()},
               {"sections", sections},
               {"details", outcome.details}};
  return {{"body", body}, {"timings", outcome.timings}};
}

std::string format_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) out += (i ? "," : "") + table.header[i];
  out += "\n";
  char buf[32];
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out += (i ? "," : "") + std::string(buf);
    }
    out += "\n";
  }
  return out;
}

std::string write_outputs(const std::string& dir, const Outcome& outcome, const ExperimentConfig& config) {
  static std::mutex m;
  const std::lock_guard<std::mutex> lock(m);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigurationError("output: cannot create directory '" + dir + "': " + ec.message());
  std::string suffix;
  for (int k = 1; fs::exists(fs::path(dir) / (outcome.experiment + suffix + ".json")); ++k)
    suffix = "." + std::to_string(k);
  const fs::path report = fs::path(dir) / (outcome.experiment + suffix + ".json");
  {
    std::ofstream os(report);
    os << make_report(outcome, config).dump(2) << "\n";
    if (!os) throw Error("output: cannot write '" + report.string() + "'");
  }
  for (const CsvTable& t : outcome.plots) {
    std::ofstream os(fs::path(dir) / (outcome.experiment + "." + t.name + suffix + ".csv"));
    os << format_csv(t);
  }
  return report.string();
}

}  // namespace nlf::cli
