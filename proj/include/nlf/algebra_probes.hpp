#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "nlf/fock_car.hpp"
#include "nlf/testfn.hpp"

namespace nlf {

// A named value compared against a tolerance: below it, or above it when minimum is set.
// Unasserted entries are recorded only.
struct CheckEntry {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool asserted = true;
  bool minimum = false;
  json detail = json::object();

  bool passed() const { return !asserted || (minimum ? value > tolerance : value < tolerance); }
};

struct LocalityReport {
  std::string experiment;
  std::vector<CheckEntry> checks;
  json functions = json::array();
  json notes = json::object();

  bool passed() const;
  double max_asserted() const;
  json to_json() const;
};

FockOperator clifford_projection(const TestFunction& f1, const TestFunction& f2, int sign, const BasisPtr& basis,
                                 double pair_tol = 1e-8);

struct MeetResult {
  FockOperator projection;
  int rank = 0;
  // Lowest eigenvalues of (1 - E) + (1 - F), ascending.
  std::vector<double> low_spectrum;
};

constexpr double kMeetThreshold = 1e-8;

MeetResult meet(const FockOperator& e, const FockOperator& f, double threshold = kMeetThreshold);

struct FunctionPair {
  TestFunction first, second;
};

// Checks S S* = P+, S* S = P-, T T* = Q+, T* T = Q- and the anticommutator ST + TS.
LocalityReport st_identity_check(const FunctionPair& f, const FunctionPair& g, const BasisPtr& basis,
                                 double tol = 1e-10);

struct CentralSequenceOptions {
  int n_max = 16;
  std::optional<Eigen::VectorXd> translation;  // empty: lattice scan at n = 1
  double lattice_threshold = 1e-6;
  // |coherence scalar| must exceed the floor at every n and, when refined, change by less than half.
  double gate_floor = 1e-14;
  bool enforce_gate = true;
  double meet_threshold = kMeetThreshold;
  double mode_tol = kDefaultModeTol;
  GridSpec grid;               // grid at n = 1
  double theta_growth = 2.0;   // theta_max(n) = grid.theta_max + theta_growth * ln n
  double panel_phase = 16.0;   // max phase of e^{i p.a} across one rapidity panel
  bool refine_coherence = false;  // recompute the coherence scalar on a doubled grid
};

struct WitnessRow {
  int n = 0;
  int grid_nodes = 0;
  cplx f1f2;                 // <f1,n|f2,n>
  cplx coherence;            // <f1 + i f2 | tau_a (f1 - i f2)>
  double coherence_change = 0.0;  // |change| under grid doubling, relative
  cplx anticommutator;       // ST + TS scalar, general form
  double omega_p = 0.0, omega_q = 0.0, omega_meet = 0.0;
  int meet_rank = 0;
  double meet_min_eigenvalue = 0.0;
  double witness = 0.0;            // |omega(P ^ Q) - omega(P) omega(Q)| with the numerical meet
  double certified_witness = 0.0;  // omega(P) omega(Q), valid when the anticommutator scalar is resolved
  double probe_overlap1 = 0.0, probe_overlap2 = 0.0;  // |<f_j,n|g>|
  double commutator_norm = 0.0;    // ||[P_n, phi(g)]||
  double commutator_bound = 0.0;
  double pair_defect = 0.0;        // max(|norm - 1|, |Re<f1|f2>|)
  std::vector<std::string> dropped;
};

struct WitnessReport {
  Eigen::VectorXd translation;
  std::vector<WitnessRow> rows;
  std::string gate_failure;  // empty when the gate held at every n
  bool ranks_zero = false;
  bool monotone = false;
  double final_witness = 0.0;

  json to_json() const;
};

WitnessReport central_sequence_experiment(const TestFunction& seed, const TestFunction& probe,
                                          const ModelConfig& config, const CentralSequenceOptions& options);

// Grid used for index n by central_sequence_experiment.
GridSpec central_sequence_grid(const CentralSequenceOptions& options, int n, double translation_norm, double m);

struct WeakLocalityOptions {
  int max_degree = 4;
  double tol = 1e-6;
  std::optional<Region> wedge;  // supports of A lie in wedge, B in its causal complement
  bool assert_zero = true;      // false for negative controls
};

LocalityReport weak_locality_check(const std::vector<TestFunction>& a_word, const std::vector<TestFunction>& b_word,
                                   const BasisPtr& basis, const WeakLocalityOptions& options);

LocalityReport relative_locality_check(const TestFunction& f, const TestFunction& g, const BasisPtr& basis,
                                       double identity_tol = 1e-10, double locality_tol = 1e-5);

struct StringLocalityOptions {
  double tol = 1e-5;
  std::vector<Eigen::VectorXd> profile_points;  // spacetime points in W2 for the Pauli-Jordan profile
  std::vector<TestFunction> controls;           // probes outside W2, recorded only
};

// W1 = W_R + (0, x1 offset of the slab), W2 = W1 + (0, a).
LocalityReport string_locality_check(const StringField& field, const std::vector<TestFunction>& probes,
                                     const BasisPtr& basis, const StringLocalityOptions& options);

struct NetElement {
  FockOperator op;
  LocalityReport report;
};

// Monomial phi(h_{i_1}) ... phi(h_{i_degree}) cycling through hs; commutation checked against probes in W2.
NetElement local_net_element(const std::vector<StringField>& hs, int degree, const std::vector<TestFunction>& probes,
                             const BasisPtr& basis, double tol = 1e-5);

// Diamond W1 ∩ W2' over the time-zero interval (lo, hi) in d = 2.
struct NetRegion {
  double lo = 0.0, hi = 1.0;
};

struct NetScanConfig {
  std::vector<std::pair<NetRegion, NetRegion>> nested;     // first within second
  std::vector<std::pair<NetRegion, NetRegion>> spacelike;  // disjoint intervals
  double tol = 1e-5;
  double mode_tol = kDefaultModeTol;
};

// String fields generating the algebra of a region: seeds inside the interval.
std::vector<StringField> region_generators(const NetRegion& region, const ModelConfig& config, int count = 2);
// Real bump probes in W_R + (0, hi), the second wedge of a region.
std::vector<TestFunction> region_probes(const NetRegion& region, int count = 3);

LocalityReport isotony_and_locality_scan(const NetScanConfig& config, const ModelConfig& model, const GridPtr& grid);

}  // namespace nlf
