#include <CLI11.hpp>

#include <cstdlib>
#include <exception>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "config.hpp"
#include "experiments.hpp"
#include "nlf/errors.hpp"
#include "report.hpp"

namespace {

enum Exit : int { kPass = 0, kCheckFailed = 1, kConfigError = 2, kCapacity = 3, kUnknown = 4, kRuntime = 5 };

struct Result {
  std::string name;
  int code = kPass;
  std::string message;
};

Result run_one(const std::string& name, const nlf::cli::ExperimentConfig& config) {
  Result r{name, kPass, {}};
  try {
    const nlf::cli::Outcome outcome = nlf::cli::find_experiment(name)(config);
    const std::string path = nlf::cli::write_outputs(config.out_dir, outcome, config);
    r.code = outcome.passed() ? kPass : kCheckFailed;
    r.message = path;
  } catch (const nlf::ConfigurationError& e) {
    r = {name, kConfigError, e.what()};
  } catch (const nlf::CapacityError& e) {
    r = {name, kCapacity, e.what()};
  } catch (const std::exception& e) {
    r = {name, kRuntime, e.what()};
  }
  return r;
}

void print(const Result& r) {
  static const char* labels[] = {"PASS", "FAIL", "CONFIG ERROR", "CAPACITY", "UNKNOWN", "ERROR"};
  std::cout << labels[r.code] << "  " << r.name << "  " << r.message << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free Majorana field experiments"};
  app.require_subcommand(0, 1);
  std::string config_path, out_dir, profile;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool show_schema = false;
  app.add_option("--config", config_path, "YAML experiment configuration")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (default: $NLF_OUT_DIR or ./nlf-out)");
  auto* seed_opt = app.add_option("--seed", seed, "override the configured seed");
  app.add_option("--tolerance-profile", profile, "default or strict")->check(CLI::IsMember({"default", "strict"}));
  app.add_option("--jobs", jobs, "concurrent experiments for run-all")->check(CLI::PositiveNumber);
  app.add_flag("--schema", show_schema, "print the configuration schema and exit");

  std::vector<std::string> names;
  for (const auto& e : nlf::cli::experiment_registry()) {
    app.add_subcommand(e.name, std::string("run ") + e.name);
    names.emplace_back(e.name);
  }
  app.add_subcommand("run-all", "run every experiment");
  app.allow_extras(false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return kPass;
    const std::string what = e.what();
    if (what.find("not expected") != std::string::npos || what.find("extra") != std::string::npos) return kUnknown;
    return kConfigError;
  }
  if (show_schema) {
    std::cout << nlf::cli::schema_description();
    return kPass;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kUnknown;
  }

  nlf::cli::ExperimentConfig config;
  try {
    if (!config_path.empty()) config = nlf::cli::load_config(config_path);
  } catch (const nlf::ConfigurationError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  }
  if (*seed_opt) config.seed = seed;
  if (!profile.empty()) config.tolerance_profile = profile;
  if (!out_dir.empty()) {
    config.out_dir = out_dir;
  } else if (config.out_dir.empty()) {
    const char* env = std::getenv("NLF_OUT_DIR");
    config.out_dir = env && *env ? env : "nlf-out";
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  if (sub != "run-all") {
    const Result r = run_one(sub, config);
    print(r);
    return r.code;
  }

  std::vector<Result> results(names.size());
  std::mutex out_mutex;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        const std::lock_guard<std::mutex> lock(out_mutex);
        if (next == names.size()) return;
        i = next++;
      }
      results[i] = run_one(names[i], config);
      const std::lock_guard<std::mutex> lock(out_mutex);
      print(results[i]);
    }
  };
  std::vector<std::thread> pool;
  for (int j = 0; j < std::min<int>(jobs, static_cast<int>(names.size())); ++j) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  int code = kPass;
  for (const Result& r : results)
    if (r.code != kPass && (code == kPass || r.code > code)) code = r.code;
  return code;
}
