#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "config.hpp"
#include "experiments.hpp"
#include "nlf/errors.hpp"
#include "report.hpp"

namespace fs = std::filesystem;
using nlf::cli::ExperimentConfig;
using nlf::cli::parse_config;

namespace {

std::string error_of(const std::string& yaml) {
  try {
    parse_config(yaml);
  } catch (const nlf::ConfigurationError& e) {
    return e.what();
  }
  return {};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nlf_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Config, MinimalDocumentGivesDefaults) {
  const ExperimentConfig c = parse_config("schema_version: 1\n");
  EXPECT_EQ(c.model.d, 2);
  EXPECT_EQ(c.grid.nodes, 16384);
  EXPECT_EQ(c.witness.n_max, 16);
  EXPECT_EQ(c.tol.car, 1e-10);
  EXPECT_EQ(c.hash(), ExperimentConfig{}.hash());
}

TEST(Config, OverridesAreRead) {
  const ExperimentConfig c = parse_config(R"(schema_version: 1
model: {d: 2, m: 2.5}
grid: {nodes: 1024, order: 16}
seed: 42
tolerance_profile: strict
experiments:
  nonlocality-witness: {n_max: 3, translation: lattice}
  string-fields: {a: 1.5}
)");
  EXPECT_EQ(c.model.m, 2.5);
  EXPECT_EQ(c.grid.nodes, 1024);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.witness.n_max, 3);
  EXPECT_FALSE(c.witness.translation.has_value());
  EXPECT_EQ(c.string_fields.a, 1.5);
  EXPECT_NEAR(c.effective_tolerances().car, 1e-11, 1e-25);
  EXPECT_NE(c.hash(), ExperimentConfig{}.hash());
}

TEST(Config, ErrorsAreCollectedAndNamed) {
  const std::string e = error_of("schema_version: 1\nmodel: {d: 7, mass: 1}\ngrid: {nodes: banana}\n");
  EXPECT_NE(e.find("model.mass: unknown key (allowed: d, m)"), std::string::npos) << e;
  EXPECT_NE(e.find("grid.nodes: expected integer"), std::string::npos) << e;
  EXPECT_NE(e.find("model.d: must be 2, 3 or 4"), std::string::npos) << e;
  EXPECT_NE(error_of("model: {d: 2}\n").find("schema_version: missing"), std::string::npos);
  EXPECT_NE(error_of("schema_version: 9\n").find("unsupported version 9"), std::string::npos);
  EXPECT_NE(error_of("schema_version: 1\nexperiments: {warp-drive: {}}\n").find("unknown key"), std::string::npos);
  EXPECT_NE(error_of("schema_version: [1\n").find("YAML syntax error"), std::string::npos);
}

TEST(Config, HashIsStableAndCanonical) {
  const ExperimentConfig a = parse_config("schema_version: 1\nseed: 5\nmodel: {m: 1.0}\n");
  const ExperimentConfig b = parse_config("seed: 5\nschema_version: 1\n");
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  EXPECT_EQ(nlf::cli::fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(nlf::cli::fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Report, BodyExcludesTimingsAndFilesAreAppendOnly) {
  const fs::path dir = fresh_dir("report");
  ExperimentConfig c;
  nlf::cli::Outcome o{"demo", "demo-claim", {}, {}, {}, {}};
  nlf::LocalityReport r;
  r.experiment = "section";
  r.checks.push_back({"x", 0.5, 1.0, true, false, nlf::json::object()});
  o.sections.push_back(r);
  o.plots.push_back({"table", {"a", "b"}, {{1.0, 0.1}}});
  o.timings["stage"] = 1.25;
  const std::string first = nlf::cli::write_outputs(dir.string(), o, c);
  o.timings["stage"] = 9.0;
  const std::string second = nlf::cli::write_outputs(dir.string(), o, c);
  EXPECT_EQ(fs::path(first).filename(), "demo.json");
  EXPECT_EQ(fs::path(second).filename(), "demo.1.json");
  EXPECT_TRUE(fs::exists(dir / "demo.table.csv"));
  EXPECT_TRUE(fs::exists(dir / "demo.table.1.csv"));
  auto body = [](const std::string& p) {
    std::ifstream is(p);
    return nlf::json::parse(is).at("body");
  };
  EXPECT_EQ(body(first), body(second));
  EXPECT_EQ(body(first).at("passed"), true);
  EXPECT_EQ(body(first).at("config_hash"), c.hash());
  std::ifstream csv(dir / "demo.table.csv");
  std::stringstream ss;
  ss << csv.rdbuf();
  EXPECT_EQ(ss.str(), "a,b\n1,0.10000000000000001\n");
  fs::remove_all(dir);
}

TEST(Experiments, RegistryAndDeterministicBody) {
  EXPECT_EQ(nlf::cli::experiment_registry().size(), 8u);
  EXPECT_THROW(nlf::cli::find_experiment("nope"), std::out_of_range);
  ExperimentConfig c = parse_config("schema_version: 1\ngrid: {nodes: 2048}\n");
  const nlf::cli::Outcome a = nlf::cli::run_oracle_crosscheck(c);
  const nlf::cli::Outcome b = nlf::cli::run_oracle_crosscheck(c);
  EXPECT_TRUE(a.passed());
  EXPECT_EQ(nlf::cli::make_report(a, c).at("body"), nlf::cli::make_report(b, c).at("body"));
  c.seed += 1;
  EXPECT_NE(nlf::cli::make_report(nlf::cli::run_oracle_crosscheck(c), c).at("body"),
            nlf::cli::make_report(a, c).at("body"));
}

TEST(Experiments, FixturesRespectTheirRegions) {
  const nlf::cli::WedgeWords w = nlf::cli::wedge_words(2);
  const nlf::Region wr = nlf::Region::right_wedge(Eigen::Vector2d(0, 0));
  const nlf::Region wl = nlf::Region::left_wedge(Eigen::Vector2d(0, 0));
  for (const auto& f : w.right) EXPECT_TRUE(nlf::region_within(f.support(), wr)) << f.label();
  for (const auto& f : w.left) EXPECT_TRUE(nlf::region_within(f.support(), wl)) << f.label();
  for (const auto& f : w.control) EXPECT_TRUE(nlf::region_within(f.support(), wr)) << f.label();
  const auto s = nlf::cli::string_setup(1.0, nlf::ModelConfig{});
  const nlf::Region w2 = nlf::Region::right_wedge(Eigen::Vector2d(0, 1.0));
  for (const auto& f : s.probes) EXPECT_TRUE(nlf::region_within(f.support(), w2)) << f.label();
  for (const auto& f : s.controls) EXPECT_FALSE(nlf::region_within(f.support(), w2)) << f.label();
}
