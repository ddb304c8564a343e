#include "experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "nlf/errors.hpp"
#include "nlf/fock_car.hpp"
#include "nlf/position.hpp"

namespace nlf::cli {

namespace {

constexpr cplx kI{0.0, 1.0};

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Eigen::VectorXd point(int d, double x0, double x1) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
  v[0] = x0;
  v[1] = x1;
  return v;
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

CheckEntry check(std::string name, double value, double tol, bool asserted = true, json detail = json::object()) {
  CheckEntry e;
  e.name = std::move(name);
  e.value = value;
  e.tolerance = tol;
  e.asserted = asserted;
  e.detail = std::move(detail);
  return e;
}

CheckEntry at_least(std::string name, double value, double bound, json detail = json::object()) {
  CheckEntry e = check(std::move(name), value, bound, true, std::move(detail));
  e.minimum = true;
  return e;
}

GridPtr config_grid(const ExperimentConfig& c) { return build_grid(c.model, c.grid); }

// Bound |phi(g)| <= |g| + |gbar| on the one-particle vectors.
double field_norm_bound(const TestFunction& g, const GridPtr& grid) {
  return restrict_to_shell(g, grid).norm() + restrict_to_shell(conjugate(g), grid).norm();
}

// Unit mass-shell norm, so residuals are on the scale of the fields.
TestFunction unit_norm(const TestFunction& f, const GridPtr& grid) {
  return scaled(1.0 / restrict_to_shell(f, grid).norm(), f).with_label(f.label());
}

}  // namespace

// ---------------------------------------------------------------- fixtures

std::vector<TestFunction> random_working_set(int count, std::uint64_t seed, int d) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-2.0, 2.0), rad(0.3, 0.8), mom(-1.0, 1.0);
  std::vector<TestFunction> out;
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd c(d), q(d);
    for (int a = 0; a < d; ++a) c[a] = pos(rng);
    const double r = rad(rng);
    for (int a = 0; a < d; ++a) q[a] = mom(rng);
    TestFunction f = bump(d, c, r);
    if (i % 2 == 1) f = modulate(f, q);
    out.push_back(f.with_label("f" + std::to_string(i)));
  }
  return out;
}

WedgeWords wedge_words(int d) {
  WedgeWords w;
  const double centers[][2] = {{0.0, 2.0}, {0.3, 1.6}, {-0.2, 2.4}, {0.0, 3.0}};
  for (int i = 0; i < 4; ++i) {
    const Eigen::VectorXd c = point(d, centers[i][0], centers[i][1]);
    TestFunction right = bump(d, c, 0.4);
    TestFunction left = bump(d, point(d, centers[i][0], -centers[i][1]), 0.4);
    if (i == 3) {
      Eigen::VectorXd q = Eigen::VectorXd::Zero(d);
      q[1] = 0.5;
      right = modulate(right, q);
      left = modulate(left, q);
    }
    w.right.push_back(right.with_label("r" + std::to_string(i)));
    w.left.push_back(left.with_label("l" + std::to_string(i)));
  }
  // Timelike to the first right-wedge functions.
  const double control[][2] = {{0.7, 2.0}, {-0.6, 1.6}};
  for (int i = 0; i < 2; ++i)
    w.control.push_back(bump(d, point(d, control[i][0], control[i][1]), 0.3).with_label("c" + std::to_string(i)));
  return w;
}

StringSetup string_setup(double a, const ModelConfig& model) {
  StringSetup s;
  const TestFunction l = default_string_seed(model.d - 1, a);
  s.lower = string_function(a, l, StringSide::LowerVanishing, model);
  s.upper = string_function(a, l, StringSide::UpperVanishing, model);
  const double probes[][2] = {{0.0, 1.0}, {0.3, 1.5}, {-0.3, 2.0}};
  for (int i = 0; i < 3; ++i)
    s.probes.push_back(bump(model.d, point(model.d, probes[i][0], a + probes[i][1]), 0.5)
                           .with_label("w2_probe" + std::to_string(i)));
  s.controls.push_back(bump(model.d, point(model.d, 0.0, 0.5 * a), 0.1 * a).with_label("w1_control"));
  return s;
}

NetScanSetup default_net_scan(double tol) {
  NetScanSetup s;
  s.region = {0.0, 1.0};
  s.scan.tol = tol;
  s.scan.nested = {{{0.25, 0.75}, {0.0, 1.0}}, {{0.0, 1.0}, {0.0, 1.0}}, {{0.5, 1.5}, {0.0, 2.0}}};
  s.scan.spacelike = {{{0.0, 1.0}, {1.5, 2.5}}, {{-2.0, -1.0}, {0.0, 1.0}}, {{0.0, 0.5}, {1.0, 3.0}}};
  return s;
}

CentralSequenceOptions witness_options(const ExperimentConfig& config) {
  const WitnessParams& w = config.witness;
  CentralSequenceOptions o;
  o.n_max = w.n_max;
  if (w.translation) o.translation = Eigen::Map<const Eigen::VectorXd>(w.translation->data(), config.model.d);
  o.gate_floor = w.gate_floor;
  o.refine_coherence = w.refine;
  o.panel_phase = w.panel_phase;
  o.theta_growth = w.theta_growth;
  o.grid = GridSpec{.nodes = w.base_nodes, .order = 16, .theta_max = w.theta_max, .cutoff = 0.0,
                    .grading = config.grid.grading > 0.0 ? config.grid.grading : 1.0};
  return o;
}

// ---------------------------------------------------------------- experiments

Outcome run_verify_car(const ExperimentConfig& config) {
  const Tolerances tol = config.effective_tolerances();
  Outcome out{"verify-car", "car-anticommutation-relations", {}, {}, {}, {}};
  Stopwatch sw;
  const GridPtr grid = config_grid(config);
  const std::vector<TestFunction> fs = random_working_set(config.car.functions, config.seed, config.model.d);
  // Restrictions are computed once; modes, fields and scalars share them.
  std::vector<OneParticleVector> v, vbar, spanning;
  for (const TestFunction& f : fs) {
    v.push_back(restrict_to_shell(f, grid));
    vbar.push_back(restrict_to_shell(conjugate(f), grid));
    spanning.push_back(v.back());
    if (!f.is_real()) spanning.push_back(vbar.back());
  }
  const BasisPtr basis = build_modes(spanning);
  out.timings["basis"] = sw.lap();

  LocalityReport car;
  car.experiment = "car";
  std::vector<FockOperator> phi;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    car.functions.push_back(to_json(fs[i]));
    phi.push_back(field(v[i], vbar[i], basis, fs[i].label()));
  }
  const FockOperator one = identity(basis);
  for (std::size_t i = 0; i < fs.size(); ++i)
    for (std::size_t j = i; j < fs.size(); ++j) {
      const cplx scalar = inner_product(vbar[j], v[i]) + inner_product(vbar[i], v[j]);
      const double res = (anticommutator(phi[i], phi[j]) - scalar * one).norm();
      car.checks.push_back(check("{phi(" + fs[i].label() + "), phi(" + fs[j].label() + ")} - scalar", res, tol.car,
                                 true, {{"scalar", cplx_json(scalar)}}));
    }
  double modes = 0.0;
  for (int i = 0; i < basis->size(); ++i)
    for (int j = 0; j < basis->size(); ++j) {
      const FockOperator ai = annihilation(i, basis), aj = annihilation(j, basis);
      const double delta = i == j ? 1.0 : 0.0;
      modes = std::max(modes, (anticommutator(ai, aj.adjoint()) - delta * one).norm());
      modes = std::max(modes, anticommutator(ai, aj).norm());
    }
  car.checks.push_back(check("mode CAR {a_i, a_j*} = delta, {a_i, a_j} = 0", modes, tol.car));
  double adj = 0.0;
  for (std::size_t i = 0; i < fs.size(); ++i)
    adj = std::max(adj, (phi[i].adjoint() - field(vbar[i], v[i], basis, fs[i].label())).norm());
  car.checks.push_back(check("phi(f)* - phi(fbar)", adj, tol.car));
  car.checks.push_back(check("mode Gram defect", basis->gram_defect(), tol.car));
  car.notes["modes"] = basis->size();
  out.sections.push_back(std::move(car));
  out.timings["car"] = sw.lap();

  LocalityReport kg;
  kg.experiment = "klein_gordon";
  const std::vector<TestFunction> inputs =
      random_working_set(config.car.klein_gordon_functions, config.seed + 7, config.model.d);
  for (const TestFunction& f : inputs) {
    const TestFunction g = klein_gordon_image(f, config.model.m);
    kg.functions.push_back(to_json(f));
    kg.checks.push_back(check("|phi((box + m^2) " + f.label() + ")| <= |g| + |gbar|", field_norm_bound(g, grid),
                              tol.klein_gordon, true, {{"reference_norm", restrict_to_shell(f, grid).norm()}}));
  }
  out.sections.push_back(std::move(kg));
  out.timings["klein_gordon"] = sw.lap();
  out.details["modes"] = basis->size();
  out.details["grid_nodes"] = grid->size();
  return out;
}

Outcome run_oracle_crosscheck(const ExperimentConfig& config) {
  const Tolerances tol = config.effective_tolerances();
  Outcome out{"oracle-crosscheck", "vacuum-expectations-pfaffian", {}, {}, {}, {}};
  Stopwatch sw;
  const GridPtr grid = config_grid(config);
  const std::vector<TestFunction> fs = random_working_set(config.oracle.functions, config.seed + 1, config.model.d);
  const BasisPtr basis = build_modes_for(fs, grid);
  const int n = static_cast<int>(fs.size());
  std::vector<OneParticleVector> v, vbar;
  std::vector<FockOperator> phi;
  for (const TestFunction& f : fs) {
    v.push_back(restrict_to_shell(f, grid));
    vbar.push_back(restrict_to_shell(conjugate(f), grid));
    phi.push_back(field(f, basis));
  }
  Eigen::MatrixXcd two(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) two(i, j) = inner_product(vbar[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(j)]);

  double worst = 0.0;
  long words = 0;
  std::vector<int> word;  // word[0] is the leftmost letter
  // Extends words to the left, so the state is phi(word) Omega.
  std::function<void(const FockVector&)> visit = [&](const FockVector& state) {
    ++words;
    const int len = static_cast<int>(word.size());
    cplx wick = 0.0;
    if (len % 2 == 0) {
      Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(len, len);
      for (int i = 0; i < len; ++i)
        for (int j = i + 1; j < len; ++j) {
          a(i, j) = two(word[static_cast<std::size_t>(i)], word[static_cast<std::size_t>(j)]);
          a(j, i) = -a(i, j);
        }
      wick = pfaffian(std::move(a));
    }
    worst = std::max(worst, std::abs(state.components[0] - wick));
    if (len == config.oracle.max_length) return;
    for (int k = 0; k < n; ++k) {
      word.insert(word.begin(), k);
      visit(phi[static_cast<std::size_t>(k)] * state);
      word.erase(word.begin());
    }
  };
  visit(vacuum(basis));

  LocalityReport r;
  r.experiment = "oracle";
  for (const TestFunction& f : fs) r.functions.push_back(to_json(f));
  r.checks.push_back(check("max |matrix - pfaffian| over all words", worst, tol.oracle, true,
                           {{"words", words}, {"max_length", config.oracle.max_length}}));
  // Public entry points on a fixed word.
  if (n >= 2) {
    const std::vector<TestFunction> w4 = {fs[0], fs[1 % n], fs[0], fs[static_cast<std::size_t>(n - 1)]};
    const double api = std::abs(vacuum_expectation_matrix(w4, basis) - vacuum_expectation_wick(w4, grid));
    r.checks.push_back(check("vacuum_expectation_matrix vs vacuum_expectation_wick", api, tol.oracle));
  }
  out.sections.push_back(std::move(r));
  out.timings["words"] = sw.lap();
  return out;
}

Outcome run_relative_locality(const ExperimentConfig& config) {
  const Tolerances tol = config.effective_tolerances();
  Outcome out{"relative-locality", "twisted-field-relative-locality", {}, {}, {}, {}};
  Stopwatch sw;
  const GridPtr grid = config_grid(config);
  const WedgeWords w = wedge_words(config.model.d);
  for (std::size_t i = 0; i < w.right.size(); ++i) {
    const TestFunction f = unit_norm(w.right[i], grid);
    const TestFunction g = unit_norm(w.left[(i + 1) % w.left.size()], grid);
    LocalityReport r = relative_locality_check(f, g, build_modes_for({f, g}, grid), tol.identity, tol.locality);
    r.experiment = "wedge pair " + std::to_string(i);
    out.sections.push_back(std::move(r));
  }
  const std::vector<TestFunction> fs = random_working_set(4, config.seed + 2, config.model.d);
  for (std::size_t i = 0; i + 1 < fs.size(); ++i) {
    const TestFunction f = unit_norm(fs[i], grid), g = unit_norm(fs[i + 1], grid);
    LocalityReport r =
        relative_locality_check(f, g, build_modes_for({f, g}, grid), tol.identity, tol.locality);
    r.experiment = "arbitrary pair " + std::to_string(i);
    out.sections.push_back(std::move(r));
  }
  LocalityReport same;
  same.experiment = "f = g";
  const TestFunction& f = w.right[0];
  same.checks.push_back(check("commutator scalar for real f with itself", std::abs(commutator_value(f, f, grid)), tol.identity));
  out.sections.push_back(std::move(same));
  out.timings["pairs"] = sw.lap();
  return out;
}

Outcome run_nonlocality_witness(const ExperimentConfig& config) {
  const Tolerances tol = config.effective_tolerances();
  Outcome out{"nonlocality-witness", "central-sequence-nonlocality-witness", {}, {}, {}, {}};
  Stopwatch sw;
  const int d = config.model.d;
  const TestFunction seed = seed_bump(d, Eigen::VectorXd::Zero(d), config.witness.seed_radius).with_label("h");
  const TestFunction probe =
      bump(d, Eigen::Map<const Eigen::VectorXd>(config.witness.probe_center.data(), d), config.witness.probe_radius)
          .with_label("g");
  CentralSequenceOptions options = witness_options(config);
  const WitnessReport wr = central_sequence_experiment(seed, probe, config.model, options);
  out.timings["sequence"] = sw.lap();
  const Eigen::VectorXd& a = wr.translation;

  // Projection and anticommutator identities at n = 1.
  const GridPtr grid1 = build_grid(config.model, central_sequence_grid(options, 1, a.cwiseAbs().sum(), config.model.m));
  const CentralSequencePair pair = central_sequence_pair(1, seed, grid1);
  const TestFunction g1 = translate(pair.f1, a).with_label("tau f1"), g2 = translate(pair.f2, a).with_label("tau f2");
  const BasisPtr basis = build_modes_for({pair.f1, pair.f2, g1, g2}, grid1);
  LocalityReport st = st_identity_check({pair.f1, pair.f2}, {g1, g2}, basis, tol.identity);
  st.experiment = "projection identities (n = 1)";
  const FockOperator p = clifford_projection(pair.f1, pair.f2, 1, basis);
  const FockOperator pm = clifford_projection(pair.f1, pair.f2, -1, basis);
  st.checks.push_back(check("|P^2 - P|", (p * p - p).norm(), tol.identity));
  st.checks.push_back(check("|P* - P|", (p.adjoint() - p).norm(), tol.identity));
  st.checks.push_back(check("|P+ + P- - 1|", (p + pm - identity(basis)).norm(), tol.identity));
  const cplx f1f2 = inner_product(restrict_to_shell(pair.f1, grid1), restrict_to_shell(pair.f2, grid1));
  st.checks.push_back(check("<Omega, P+ Omega> - (1 + i<f1|f2>)/2",
                            std::abs(vacuum_expectation(p) - 0.5 * (1.0 + kI * f1f2)), tol.identity));
  out.sections.push_back(std::move(st));

  LocalityReport seq;
  seq.experiment = "central sequence";
  int max_rank = 0;
  double max_drop = 0.0, bound_excess = 0.0;
  for (std::size_t i = 0; i < wr.rows.size(); ++i) {
    const WitnessRow& row = wr.rows[i];
    max_rank = std::max(max_rank, row.meet_rank);
    if (i > 0) max_drop = std::max(max_drop, wr.rows[i - 1].witness - row.witness);
    bound_excess = std::max(bound_excess, row.commutator_norm - row.commutator_bound * (1.0 + 1e-8) - 1e-14);
  }
  const WitnessRow& last = wr.rows.back();
  seq.checks.push_back(check("max rank(P_n ^ Q_n)", max_rank, 0.5));
  seq.checks.push_back(check("witness decrease between consecutive n", max_drop, tol.witness_noise));
  seq.checks.push_back(at_least("witness at n_max", last.witness, tol.witness, {{"n", last.n}}));
  seq.checks.push_back(check("|<f1|f2> + i| at n_max", std::abs(last.f1f2 + kI), tol.f1f2, true, {{"n", last.n}}));
  seq.checks.push_back(check("|[P_n, phi(g)]| above the bound", std::max(0.0, bound_excess), 1e-12));
  seq.checks.push_back(check("1 - omega(P) omega(Q) at n_max (recorded)", 1.0 - last.certified_witness,
                             1.0 - tol.witness, false, {{"certified_witness", last.certified_witness}}));
  out.sections.push_back(std::move(seq));
  out.details = wr.to_json();

  CsvTable t{"witness_vs_n",
             {"n", "witness", "certified_witness", "omega_P", "omega_meet", "meet_rank", "meet_min_eigenvalue",
              "abs_coherence", "coherence_change", "re_f1f2", "im_f1f2", "probe_overlap_1", "probe_overlap_2",
              "commutator_norm", "commutator_bound", "grid_nodes"},
             {}};
  for (const WitnessRow& row : wr.rows)
    t.rows.push_back({static_cast<double>(row.n), row.witness, row.certified_witness, row.omega_p, row.omega_meet,
                      static_cast<double>(row.meet_rank), row.meet_min_eigenvalue, std::abs(row.coherence),
                      row.coherence_change, row.f1f2.real(), row.f1f2.imag(), row.probe_overlap1, row.probe_overlap2,
                      row.commutator_norm, row.commutator_bound, static_cast<double>(row.grid_nodes)});
  out.plots.push_back(std::move(t));
  out.timings["identities"] = sw.lap();
  return out;
}

Outcome run_weak_locality(const ExperimentConfig& config) {
  const Tolerances tol = config.effective_tolerances();
  Outcome out{"weak-locality", "wedge-weak-locality", {}, {}, {}, {}};
  Stopwatch sw;
  const GridPtr grid = config_grid(config);
  const WedgeWords w = wedge_words(config.model.d);
  auto unit = [&](const TestFunction& f) { return unit_norm(f, grid); };
  std::vector<TestFunction> right, left;
  for (const TestFunction& f : w.right) right.push_back(unit(f));
  for (const TestFunction& f : w.left) left.push_back(unit(f));
  std::vector<TestFunction> all = right;
  all.insert(all.end(), left.begin(), left.end());
  WeakLocalityOptions o;
  o.max_degree = config.weak.max_degree;
  o.tol = tol.weak;
  LocalityReport main = weak_locality_check(right, left, build_modes_for(all, grid), o);
  main.experiment = "W_R words against W_L words";
  out.sections.push_back(std::move(main));
  out.timings["wedge_words"] = sw.lap();

  // Same-wedge control: recorded only.
  std::vector<TestFunction> ctrl_a, ctrl_b;
  for (int i = 0; i < 2; ++i) ctrl_a.push_back(right[static_cast<std::size_t>(i)]);
  for (const TestFunction& f : w.control) ctrl_b.push_back(unit(f));
  std::vector<TestFunction> all_c = ctrl_a;
  all_c.insert(all_c.end(), ctrl_b.begin(), ctrl_b.end());
  WeakLocalityOptions oc = o;
  oc.max_degree = std::min(o.max_degree, 2);
  oc.assert_zero = false;
  LocalityReport control = weak_locality_check(ctrl_a, ctrl_b, build_modes_for(all_c, grid), oc);
  control.experiment = "same-wedge control";
  double worst = 0.0;
  for (const CheckEntry& c : control.checks) worst = std::max(worst, c.value);
  out.details["control_max_residual"] = worst;
  control.checks.push_back(at_least("same-wedge control exceeds 1e-3 for some word", worst, 1e-3));
  out.sections.push_back(std::move(control));

  out.timings["control"] = sw.lap();
  return out;
}

Outcome run_bisognano_wichmann(const ExperimentConfig& config) {
  const Tolerances tol = config.effective_tolerances();
  if (config.model.d != 2) throw ConfigurationError("bisognano-wichmann: the rapidity method needs model.d = 2");
  Outcome out{"bisognano-wichmann", "wedge-modular-objects-one-particle", {}, {}, {}, {}};
  Stopwatch sw;
  const double m = config.model.m;
  RapiditySpec rs{.span = config.bw.span, .count = config.bw.count};
  RapiditySpec fine = rs;
  fine.count *= 2;
  ContinuationSpec cs{.window = config.bw.window, .sign = 1, .padding = config.bw.padding,
                      .growth_limit = config.bw.growth_limit};
  const std::vector<TestFunction> family = default_wedge_family();

  LocalityReport cal;
  cal.experiment = "sign calibration";
  const SignCalibration sc = calibrate_continuation_sign(family, rs, cs, m);
  cs.sign = sc.sign;
  cal.checks.push_back(check("calibration is decisive", sc.decisive ? 0.0 : 1.0, 0.5, true, sc.to_json()));
  cal.notes["sign"] = sc.sign;
  out.sections.push_back(std::move(cal));

  LocalityReport tom;
  tom.experiment = "tomita";
  CsvTable conv{"convergence", {"count", "spacing", "function", "residual"}, {}};
  for (std::size_t i = 0; i < family.size(); ++i) {
    const TestFunction& f = family[i];
    tom.functions.push_back(to_json(f));
    const TomitaResult coarse = tomita_S_check(f, rs, cs, m);
    const TomitaResult refined = tomita_S_check(f, fine, cs, m);
    tom.checks.push_back(check("residual " + f.label(), coarse.residual, tol.tomita, true, coarse.to_json()));
    const double ratio = refined.residual > 0.0 ? coarse.residual / refined.residual : INFINITY;
    tom.checks.push_back(at_least("refinement gain " + f.label(), ratio, 4.0, {{"refined", refined.residual}}));
    for (int c : {rs.count / 2, rs.count, rs.count * 2, rs.count * 4}) {
      RapiditySpec s = rs;
      s.count = c;
      conv.rows.push_back({static_cast<double>(c), 2.0 * s.span / c, static_cast<double>(i),
                           tomita_S_check(f, s, cs, m).residual});
    }
  }
  out.plots.push_back(std::move(conv));
  out.sections.push_back(std::move(tom));
  out.timings["tomita"] = sw.lap();

  LocalityReport flow;
  flow.experiment = "boost flow and continuation";
  const RapidityProfile prof = rapidity_profile(family[0], rs, m);
  const double nrm = prof.norm();
  auto diff_norm = [](const RapidityProfile& x, const RapidityProfile& y) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.values.size(); ++j) s += std::norm(x.values[j] - y.values[j]);
    return std::sqrt(std::numbers::pi * x.spacing() * s);
  };
  flow.checks.push_back(check("unitarity |U(0.7) f| - |f|", std::abs(boost_flow(prof, 0.7).norm() - nrm) / nrm, 1e-10));
  flow.checks.push_back(check("group law", diff_norm(boost_flow(boost_flow(prof, 0.3), 0.5), boost_flow(prof, 0.8)) / nrm,
                              1e-8));
  flow.checks.push_back(check("t = 0 is the identity", diff_norm(boost_flow(prof, 0.0), prof) / nrm, 1e-15));
  const GridPtr grid = build_grid(config.model, config.grid);
  const double shell = std::sqrt(inner_product(restrict_to_shell(family[0], grid), restrict_to_shell(family[0], grid)).real());
  flow.checks.push_back(check("profile norm vs mass-shell norm", std::abs(nrm - shell) / shell, 1e-8));
  flow.checks.push_back(check("Delta consistency (two half continuations vs 2 pi)", delta_consistency(prof, cs), 1e-6));
  const TestFunction shifted = translate(family[0], vec({0.0, 0.25})).with_label("translated");
  const double base = tomita_S_check(family[0], rs, cs, m).residual;
  const double moved = tomita_S_check(shifted, rs, cs, m).residual;
  flow.checks.push_back(check("translation covariance (recorded)", std::abs(moved - base), tol.tomita, false,
                              {{"base", base}, {"translated", moved}}));
  const TestFunction left = bump(2, vec({0.0, -2.0}), 0.5).with_label("W_L bump");
  const double growth =
      imaginary_boost(rapidity_profile(left, rs, m), std::numbers::pi, cs).metadata["growth"].get<double>();
  flow.checks.push_back(check("W_L growth under the i pi multiplier (recorded)", growth, cs.growth_limit, false));
  bool violation = false;
  try {
    half_continuation(rapidity_profile(left.with_support(Region::right_wedge(vec({0.0, 0.0}))), rs, m), cs);
  } catch (const DomainViolation&) {
    violation = true;
  }
  flow.checks.push_back(check("W_L bump with forged W_R metadata raises a domain violation", violation ? 0.0 : 1.0, 0.5));
  out.sections.push_back(std::move(flow));

  const RapidityProfile cont = half_continuation(prof, cs);
  CsvTable dump{"profile", {"theta", "re", "im", "re_continued", "im_continued"}, {}};
  for (std::size_t j = 0; j < prof.theta.size(); ++j)
    dump.rows.push_back({prof.theta[j], prof.values[j].real(), prof.values[j].imag(), cont.values[j].real(),
                         cont.values[j].imag()});
  out.plots.push_back(std::move(dump));
  out.timings["flow"] = sw.lap();
  return out;
}

Outcome run_string_fields(const ExperimentConfig& config) {
  const Tolerances tol = config.effective_tolerances();
  if (config.model.d != 2) throw ConfigurationError("string-fields: the harness covers model.d = 2");
  Outcome out{"string-fields", "string-localized-fields", {}, {}, {}, {}};
  Stopwatch sw;
  const double a = config.string_fields.a;
  const StringSetup s = string_setup(a, config.model);
  const GridPtr grid = config_grid(config);

  LocalityReport supp;
  supp.experiment = "supports";
  std::vector<Eigen::VectorXd> xs;
  const int samples = 241;
  for (int i = 0; i < samples; ++i) xs.push_back(vec({-3.0 + (a + 6.0) * i / (samples - 1)}));
  const SupportCheck lower = support_check(s.lower.k, xs, Region::slab(0.0, INFINITY));
  const SupportCheck upper = support_check(s.upper.k, xs, Region::slab(-INFINITY, a));
  supp.functions = json::array({to_json(s.lower.k), to_json(s.upper.k)});
  supp.checks.push_back(check("|k(x)| for x_1 < 0, relative", lower.ratio, tol.string_field, true,
                              {{"peak", lower.peak}, {"outside_points", lower.outside_count}}));
  supp.checks.push_back(check("|k_dual(x)| for x_1 > a, relative", upper.ratio, tol.string_field, true,
                              {{"peak", upper.peak}, {"outside_points", upper.outside_count}}));
  out.sections.push_back(std::move(supp));
  const std::vector<cplx> kl = position_profile(s.lower.k, xs), ku = position_profile(s.upper.k, xs);
  CsvTable prof{"support_profile", {"x1", "abs_k", "abs_k_dual"}, {}};
  for (std::size_t i = 0; i < xs.size(); ++i) prof.rows.push_back({xs[i][0], std::abs(kl[i]), std::abs(ku[i])});
  out.plots.push_back(std::move(prof));
  out.timings["supports"] = sw.lap();

  std::vector<TestFunction> fs = {s.lower.h};
  fs.insert(fs.end(), s.probes.begin(), s.probes.end());
  fs.insert(fs.end(), s.controls.begin(), s.controls.end());
  StringLocalityOptions o;
  o.tol = tol.string_field;
  o.controls = s.controls;
  LocalityReport loc = string_locality_check(s.lower, s.probes, build_modes_for(fs, grid), o);
  out.sections.push_back(std::move(loc));
  out.timings["anticommutators"] = sw.lap();
  return out;
}

Outcome run_local_net(const ExperimentConfig& config) {
  const Tolerances tol = config.effective_tolerances();
  if (config.model.d != 2) throw ConfigurationError("local-net: the harness covers model.d = 2");
  Outcome out{"local-net", "string-local-net", {}, {}, {}, {}};
  Stopwatch sw;
  const GridPtr grid = config_grid(config);
  const NetScanSetup setup = default_net_scan(tol.net);
  const std::vector<StringField> gens = region_generators(setup.region, config.model);
  const std::vector<TestFunction> probes = region_probes(setup.region);
  std::vector<TestFunction> fs;
  for (const StringField& g : gens) fs.push_back(g.h);
  fs.insert(fs.end(), probes.begin(), probes.end());
  const BasisPtr basis = build_modes_for(fs, grid);
  for (int degree : {config.net.degree, 0, 1}) {
    NetElement e = local_net_element(gens, degree, probes, basis, tol.net);
    e.report.experiment = "monomial of degree " + std::to_string(degree) + (degree % 2 ? " (control)" : "");
    out.sections.push_back(std::move(e.report));
  }
  out.timings["elements"] = sw.lap();
  NetScanConfig scan = setup.scan;
  LocalityReport r = isotony_and_locality_scan(scan, config.model, grid);
  out.sections.push_back(std::move(r));
  out.timings["scan"] = sw.lap();
  return out;
}

const std::vector<ExperimentEntry>& experiment_registry() {
  static const std::vector<ExperimentEntry> registry = {
      {"verify-car", run_verify_car},
      {"oracle-crosscheck", run_oracle_crosscheck},
      {"relative-locality", run_relative_locality},
      {"nonlocality-witness", run_nonlocality_witness},
      {"weak-locality", run_weak_locality},
      {"bisognano-wichmann", run_bisognano_wichmann},
      {"string-fields", run_string_fields},
      {"local-net", run_local_net},
  };
  return registry;
}

Runner find_experiment(const std::string& name) {
  for (const ExperimentEntry& e : experiment_registry())
    if (name == e.name) return e.run;
  throw std::out_of_range("unknown subcommand '" + name + "'");
}

}  // namespace nlf::cli
