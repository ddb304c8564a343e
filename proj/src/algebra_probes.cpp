#include "nlf/algebra_probes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nlf/errors.hpp"

namespace nlf {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kProjectionTol = 1e-8;

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

CheckEntry entry(std::string name, double value, double tol, bool asserted = true, json detail = json::object()) {
  return CheckEntry{std::move(name), value, tol, asserted, false, std::move(detail)};
}

CheckEntry lower_bound_entry(std::string name, double value, double bound, json detail = json::object()) {
  return CheckEntry{std::move(name), value, bound, true, true, std::move(detail)};
}

double relative(const FockOperator& x, double scale) { return scale > 0.0 ? x.norm() / scale : x.norm(); }

FockOperator projection_from_fields(const FockOperator& phi1, const FockOperator& phi2, int sign) {
  const BasisPtr& basis = phi1.basis;
  FockOperator p = 0.5 * (identity(basis) + (sign * 1.0 * kI) * (phi1 * phi2));
  p.label = sign > 0 ? "P+" : "P-";
  return p;
}

void require_projection(const FockOperator& e, const char* what) {
  const double idem = (e * e - e).norm();
  const double herm = (e.adjoint() - e).norm();
  if (idem > kProjectionTol || herm > kProjectionTol) {
    std::ostringstream os;
    os << "meet: " << what << " is not a projection (|E^2 - E| = " << idem << ", |E* - E| = " << herm << ")";
    throw StructuralError(os.str());
  }
}

// Causal complement of a wedge.
Region opposite_wedge(const Region& w) {
  if (w.kind == Region::Kind::RightWedge) return Region::left_wedge(w.point);
  if (w.kind == Region::Kind::LeftWedge) return Region::right_wedge(w.point);
  throw ConfigurationError("weak_locality_check: the localization region must be a wedge");
}

Eigen::VectorXd wedge_apex(int d, double x1) {
  Eigen::VectorXd apex = Eigen::VectorXd::Zero(d);
  apex[1] = x1;
  return apex;
}

// sqrt(<g|g> + <gbar|gbar>): the scale of |{phi(f), phi(g)}| for unit f.
double field_scale(const OneParticleVector& v, const OneParticleVector& vbar) {
  return std::sqrt(v.norm() * v.norm() + vbar.norm() * vbar.norm());
}

FockOperator monomial(const std::vector<FockOperator>& fields, int degree, const BasisPtr& basis) {
  FockOperator m = identity(basis);
  for (int j = 0; j < degree; ++j) m = m * fields[static_cast<std::size_t>(j) % fields.size()];
  m.label = "monomial(" + std::to_string(degree) + ")";
  return m;
}

std::string mask_name(const char* word, unsigned mask, int size) {
  std::string s = word;
  s += "[";
  bool first = true;
  for (int i = 0; i < size; ++i)
    if (mask & (1U << i)) {
      if (!first) s += ",";
      s += std::to_string(i);
      first = false;
    }
  return s + "]";
}

}  // namespace

bool LocalityReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckEntry& c) { return c.passed(); });
}

double LocalityReport::max_asserted() const {
  double m = 0.0;
  for (const CheckEntry& c : checks)
    if (c.asserted && !c.minimum) m = std::max(m, c.value);
  return m;
}

json LocalityReport::to_json() const {
  json rows = json::array();
  for (const CheckEntry& c : checks)
    rows.push_back({{"check", c.name},
                    {"value", c.value},
                    {"tolerance", c.tolerance},
                    {"comparison", c.minimum ? "greater" : "less"},
                    {"asserted", c.asserted},
                    {"passed", c.passed()},
                    {"detail", c.detail}});
  return {{"experiment", experiment}, {"checks", rows}, {"functions", functions}, {"notes", notes},
          {"passed", passed()}};
}

// ---------------------------------------------------------------- projections

FockOperator clifford_projection(const TestFunction& f1, const TestFunction& f2, int sign, const BasisPtr& basis,
                                 double pair_tol) {
  if (sign != 1 && sign != -1) throw ConfigurationError("clifford_projection: sign must be +1 or -1");
  const GridPtr& grid = basis->grid();
  const OneParticleVector v1 = restrict_to_shell(f1, grid), v2 = restrict_to_shell(f2, grid);
  double defect = std::max(std::abs(v1.norm() * v1.norm() - 1.0), std::abs(v2.norm() * v2.norm() - 1.0));
  defect = std::max(defect, std::abs(inner_product(v1, v2).real()));
  if (!f1.is_real() || !f2.is_real())
    throw NonOrthonormalPairError("clifford_projection: test functions must be real", defect);
  if (defect > pair_tol) {
    std::ostringstream os;
    os << "clifford_projection: pair is not orthonormal in the real sense (defect " << defect << ")";
    throw NonOrthonormalPairError(os.str(), defect);
  }
  return projection_from_fields(field(v1, v1, basis, f1.label()), field(v2, v2, basis, f2.label()), sign);
}

MeetResult meet(const FockOperator& e, const FockOperator& f, double threshold) {
  if (e.basis != f.basis) throw StructuralError("meet: operators act on different Fock spaces");
  require_projection(e, "first argument");
  require_projection(f, "second argument");
  const BasisPtr& basis = e.basis;
  const Eigen::MatrixXcd one = Eigen::MatrixXcd::Identity(e.matrix.rows(), e.matrix.cols());
  Eigen::MatrixXcd sum = (one - e.matrix) + (one - f.matrix);
  sum = 0.5 * (sum + sum.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(sum);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  MeetResult out{FockOperator{basis, Eigen::MatrixXcd::Zero(sum.rows(), sum.cols()), "meet"}, 0, {}};
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (i < 8) out.low_spectrum.push_back(lambda[i]);
    if (lambda[i] < threshold) {
      const Eigen::VectorXcd v = eig.eigenvectors().col(i);
      out.projection.matrix += v * v.adjoint();
      ++out.rank;
    }
  }
  return out;
}

LocalityReport st_identity_check(const FunctionPair& f, const FunctionPair& g, const BasisPtr& basis, double tol) {
  LocalityReport r;
  r.experiment = "st_identity";
  for (const TestFunction* t : {&f.first, &f.second, &g.first, &g.second}) r.functions.push_back(to_json(*t));
  const GridPtr& grid = basis->grid();

  std::vector<OneParticleVector> v;
  for (const TestFunction* t : {&f.first, &f.second, &g.first, &g.second}) v.push_back(restrict_to_shell(*t, grid));
  auto pair_defect = [&](int i) {
    const OneParticleVector& a = v[static_cast<std::size_t>(i)];
    const OneParticleVector& b = v[static_cast<std::size_t>(i + 1)];
    double d = std::max(std::abs(a.norm() * a.norm() - 1.0), std::abs(b.norm() * b.norm() - 1.0));
    return std::max(d, std::abs(inner_product(a, b).real()));
  };
  const bool real = f.first.is_real() && f.second.is_real() && g.first.is_real() && g.second.is_real();
  const double df = real ? pair_defect(0) : 1.0, dg = real ? pair_defect(2) : 1.0;
  r.checks.push_back(entry("f_pair_precondition", df, 1e-8, true, {{"real", real}}));
  r.checks.push_back(entry("g_pair_precondition", dg, 1e-8, true, {{"real", real}}));
  if (!r.passed()) {
    r.notes["precondition"] = "pairs must be real with unit norms and Re<f1|f2> = 0; identities not evaluated";
    return r;
  }

  const FockOperator phi1 = field(v[0], v[0], basis), phi2 = field(v[1], v[1], basis);
  const FockOperator psi1 = field(v[2], v[2], basis), psi2 = field(v[3], v[3], basis);
  const FockOperator s = 0.5 * (phi1 - kI * phi2);
  const FockOperator t = 0.5 * (psi1 - kI * psi2);
  const FockOperator p_plus = projection_from_fields(phi1, phi2, 1), p_minus = projection_from_fields(phi1, phi2, -1);
  const FockOperator q_plus = projection_from_fields(psi1, psi2, 1), q_minus = projection_from_fields(psi1, psi2, -1);
  r.checks.push_back(entry("SS* - P+", (s * s.adjoint() - p_plus).norm(), tol));
  r.checks.push_back(entry("S*S - P-", (s.adjoint() * s - p_minus).norm(), tol));
  r.checks.push_back(entry("TT* - Q+", (t * t.adjoint() - q_plus).norm(), tol));
  r.checks.push_back(entry("T*T - Q-", (t.adjoint() * t - q_minus).norm(), tol));

  // u = f1 - i f2, w = g1 - i g2; ubar = f1 + i f2 for real pairs.
  const OneParticleVector u = v[0] - kI * v[1], ubar = v[0] + kI * v[1];
  const OneParticleVector w = v[2] - kI * v[3], wbar = v[2] + kI * v[3];
  const cplx general = 0.25 * (inner_product(wbar, u) + inner_product(ubar, w));
  const cplx spacelike_form = 0.5 * inner_product(ubar, w);
  const FockOperator anti = s * t + t * s;
  r.checks.push_back(entry("ST + TS - scalar", (anti - general * identity(basis)).norm(), tol, true,
                           {{"scalar", cplx_json(general)}}));
  const bool separated = spacelike_separated(f.first.support(), g.first.support()) &&
                         spacelike_separated(f.first.support(), g.second.support()) &&
                         spacelike_separated(f.second.support(), g.first.support()) &&
                         spacelike_separated(f.second.support(), g.second.support());
  r.checks.push_back(entry("ST + TS - (1/2)<f1 + i f2|g1 - i g2>", (anti - spacelike_form * identity(basis)).norm(),
                           1e-5, separated, {{"scalar", cplx_json(spacelike_form)}, {"spacelike", separated}}));
  return r;
}

// ---------------------------------------------------------------- central sequence

GridSpec central_sequence_grid(const CentralSequenceOptions& options, int n, double translation_norm, double m) {
  GridSpec spec = options.grid;
  if (spec.grading <= 0.0) spec.grading = 1.0;
  spec.theta_max = options.grid.theta_max + options.theta_growth * std::log(static_cast<double>(n));
  const int base_panels = std::max(1, spec.nodes / spec.order);
  int panels = base_panels;
  if (translation_norm > 0.0) {
    const double range = 2.0 * (spec.theta_max + spec.grading * std::sinh(spec.theta_max));
    // d p / d s <= 1 / grading per unit mass, so the phase of e^{i p.a} moves at most |a| m / g per unit s.
    const double step = options.panel_phase * spec.grading / (translation_norm * m);
    panels = std::max(panels, static_cast<int>(std::ceil(range / step)));
  }
  spec.nodes = panels * spec.order;
  return spec;
}

json WitnessReport::to_json() const {
  json rows_json = json::array();
  for (const WitnessRow& w : rows)
    rows_json.push_back({{"n", w.n},
                         {"grid_nodes", w.grid_nodes},
                         {"f1_f2", cplx_json(w.f1f2)},
                         {"coherence", cplx_json(w.coherence)},
                         {"coherence_change", w.coherence_change},
                         {"anticommutator_scalar", cplx_json(w.anticommutator)},
                         {"omega_P", w.omega_p},
                         {"omega_Q", w.omega_q},
                         {"omega_meet", w.omega_meet},
                         {"meet_rank", w.meet_rank},
                         {"meet_min_eigenvalue", w.meet_min_eigenvalue},
                         {"witness", w.witness},
                         {"certified_witness", w.certified_witness},
                         {"probe_overlap_1", w.probe_overlap1},
                         {"probe_overlap_2", w.probe_overlap2},
                         {"commutator_norm", w.commutator_norm},
                         {"commutator_bound", w.commutator_bound},
                         {"pair_defect", w.pair_defect},
                         {"dropped", w.dropped}});
  json a = json::array();
  for (Eigen::Index i = 0; i < translation.size(); ++i) a.push_back(translation[i]);
  return {{"translation", a},     {"rows", rows_json},         {"gate_failure", gate_failure},
          {"ranks_zero", ranks_zero}, {"monotone", monotone}, {"final_witness", final_witness}};
}

namespace {

// e^{i(p0 a0 - p.a)} on every node.
Eigen::VectorXcd translation_phase(const GridPtr& grid, const Eigen::VectorXd& a) {
  Eigen::VectorXcd out(grid->size());
  for (int i = 0; i < grid->size(); ++i) {
    double ph = grid->omega()[i] * a[0];
    for (int j = 0; j < grid->spatial_dim(); ++j) ph -= grid->momenta()(i, j) * a[j + 1];
    out[i] = std::polar(1.0, ph);
  }
  return out;
}

OneParticleVector phase_times(const Eigen::VectorXcd& phase, const OneParticleVector& v) {
  return {v.grid, phase.cwiseProduct(v.values)};
}

cplx coherence_on(const GridPtr& grid, const CentralSequencePair& pair, const Eigen::VectorXd& a) {
  const OneParticleVector v1 = restrict_to_shell(pair.f1, grid), v2 = restrict_to_shell(pair.f2, grid);
  const Eigen::VectorXcd ph = translation_phase(grid, a);
  return inner_product(v1 + kI * v2, phase_times(ph, v1 - kI * v2));
}

}  // namespace

WitnessReport central_sequence_experiment(const TestFunction& seed, const TestFunction& probe,
                                          const ModelConfig& config, const CentralSequenceOptions& options) {
  config.validate();
  if (config.d != 2) throw PreconditionError("central_sequence_experiment: per-n grid refinement supports d = 2 only");
  if (options.n_max < 1) throw ConfigurationError("central_sequence_experiment: n_max must be at least 1");
  if (probe.dim() != config.d || probe.spatial()) throw ConfigurationError("central_sequence_experiment: bad probe");

  WitnessReport report;
  if (options.translation) {
    report.translation = *options.translation;
    if (report.translation.size() != config.d)
      throw ConfigurationError("central_sequence_experiment: translation has the wrong dimension");
  } else {
    const std::vector<Eigen::VectorXd> lattice = default_translation_lattice(config.d);
    double reach = 0.0;
    for (const auto& a : lattice) reach = std::max(reach, a.cwiseAbs().sum());
    const GridPtr grid = build_grid(config, central_sequence_grid(options, 1, reach, config.m));
    const auto chosen = select_coherent_translation({central_sequence_pair(1, seed, grid)}, lattice,
                                                    options.lattice_threshold, grid);
    if (!chosen) throw ConfigurationError("central_sequence_experiment: no lattice translation passes the gate");
    report.translation = chosen->a;
  }
  const Eigen::VectorXd& a = report.translation;
  const double anorm = a.cwiseAbs().sum();

  for (int n = 1; n <= options.n_max; ++n) {
    const GridSpec spec = central_sequence_grid(options, n, anorm, config.m);
    const GridPtr grid = build_grid(config, spec);
    const CentralSequencePair pair = central_sequence_pair(n, seed, grid);
    WitnessRow row;
    row.n = n;
    row.grid_nodes = grid->size();

    const OneParticleVector v1 = restrict_to_shell(pair.f1, grid), v2 = restrict_to_shell(pair.f2, grid);
    const Eigen::VectorXcd ph = translation_phase(grid, a);
    const OneParticleVector w1 = phase_times(ph, v1), w2 = phase_times(ph, v2);
    const OneParticleVector gv = restrict_to_shell(probe, grid);
    const OneParticleVector gbar = probe.is_real() ? gv : restrict_to_shell(conjugate(probe), grid);

    row.f1f2 = inner_product(v1, v2);
    row.pair_defect = std::max({std::abs(v1.norm() * v1.norm() - 1.0), std::abs(v2.norm() * v2.norm() - 1.0),
                                std::abs(row.f1f2.real())});
    row.coherence = inner_product(v1 + kI * v2, w1 - kI * w2);
    if (options.refine_coherence) {
      GridSpec fine = spec;
      fine.nodes *= 2;
      const cplx c2 = coherence_on(build_grid(config, fine), pair, a);
      row.coherence_change = std::abs(c2 - row.coherence) / std::max(std::abs(c2), 1e-300);
    }
    const bool unresolved = options.refine_coherence && row.coherence_change > 0.5;
    if ((std::abs(row.coherence) <= options.gate_floor || unresolved) && report.gate_failure.empty()) {
      std::ostringstream os;
      os << "coherence gate fails at n = " << n << " (|scalar| = " << std::abs(row.coherence) << ", floor "
         << options.gate_floor << ", relative change under refinement " << row.coherence_change << ")";
      report.gate_failure = os.str();
      if (options.enforce_gate) throw ConfigurationError("central_sequence_experiment: " + report.gate_failure);
    }

    // Translated pair: g_j = tau_a f_j.
    row.anticommutator = 0.25 * (inner_product(w1 + kI * w2, v1 - kI * v2) + inner_product(v1 + kI * v2, w1 - kI * w2));

    std::vector<OneParticleVector> inputs{v1, v2, w1, w2, gv};
    if (!probe.is_real()) inputs.push_back(gbar);
    const BasisPtr basis = build_modes(inputs, options.mode_tol);
    for (const DroppedVector& d : basis->dropped()) {
      static const char* names[] = {"f1", "f2", "tau f1", "tau f2", "g", "gbar"};
      std::ostringstream os;
      os << names[d.input] << " (residual " << d.residual << ")";
      row.dropped.push_back(os.str());
    }
    const FockOperator phi1 = field(v1, v1, basis, "f1"), phi2 = field(v2, v2, basis, "f2");
    const FockOperator psi1 = field(w1, w1, basis, "tau f1"), psi2 = field(w2, w2, basis, "tau f2");
    const FockOperator phig = field(gv, gbar, basis, "g");
    const FockOperator p = projection_from_fields(phi1, phi2, 1), q = projection_from_fields(psi1, psi2, 1);
    const MeetResult mr = meet(p, q, options.meet_threshold);

    row.omega_p = vacuum_expectation(p).real();
    row.omega_q = vacuum_expectation(q).real();
    row.omega_meet = vacuum_expectation(mr.projection).real();
    row.meet_rank = mr.rank;
    row.meet_min_eigenvalue = mr.low_spectrum.empty() ? 0.0 : mr.low_spectrum.front();
    row.witness = std::abs(row.omega_meet - row.omega_p * row.omega_q);
    row.certified_witness = std::abs(row.omega_p * row.omega_q);

    row.probe_overlap1 = std::abs(inner_product(v1, gv));
    row.probe_overlap2 = std::abs(inner_product(v2, gv));
    row.commutator_norm = commutator(p, phig).norm();
    // [P, phi(g)] = (i/2)(phi1 {phi2, phi(g)} - {phi1, phi(g)} phi2)
    const double a1 = std::abs(inner_product(gbar, v1) + inner_product(v1, gv));
    const double a2 = std::abs(inner_product(gbar, v2) + inner_product(v2, gv));
    row.commutator_bound = 0.5 * (a2 * phi1.norm() + a1 * phi2.norm());
    report.rows.push_back(std::move(row));
  }

  report.ranks_zero = std::all_of(report.rows.begin(), report.rows.end(), [](const WitnessRow& w) { return w.meet_rank == 0; });
  report.monotone = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    if (report.rows[i].witness < report.rows[i - 1].witness - 1e-3) report.monotone = false;
  report.final_witness = report.rows.back().witness;
  return report;
}

// ---------------------------------------------------------------- weak and relative locality

LocalityReport weak_locality_check(const std::vector<TestFunction>& a_word, const std::vector<TestFunction>& b_word,
                                   const BasisPtr& basis, const WeakLocalityOptions& options) {
  const int na = static_cast<int>(a_word.size()), nb = static_cast<int>(b_word.size());
  if (na > 16 || nb > 16) throw CapacityError("weak_locality_check: words longer than 16 letters");
  LocalityReport r;
  r.experiment = "weak_locality";
  const GridPtr& grid = basis->grid();
  const int d = grid->config().d;
  const Region wedge = options.wedge ? *options.wedge : Region::right_wedge(Eigen::VectorXd::Zero(d));
  const Region complement = opposite_wedge(wedge);
  r.notes["wedge"] = wedge.to_json();
  if (options.assert_zero) {
    for (const TestFunction& f : a_word)
      if (!region_within(f.support(), wedge))
        throw PreconditionError("weak_locality_check: support of '" + f.label() + "' is not inside the wedge");
    for (const TestFunction& f : b_word)
      if (!region_within(f.support(), complement))
        throw PreconditionError("weak_locality_check: support of '" + f.label() + "' is not inside the complement");
  }

  std::vector<TestFunction> all = a_word;
  all.insert(all.end(), b_word.begin(), b_word.end());
  const int total = na + nb;
  std::vector<OneParticleVector> v, vbar;
  std::vector<FockOperator> phi;
  for (const TestFunction& f : all) {
    r.functions.push_back(to_json(f));
    v.push_back(restrict_to_shell(f, grid));
    vbar.push_back(f.is_real() ? v.back() : restrict_to_shell(conjugate(f), grid));
    phi.push_back(field(v.back(), vbar.back(), basis, f.label()));
  }
  Eigen::MatrixXcd two_point(total, total);
  for (int i = 0; i < total; ++i)
    for (int j = 0; j < total; ++j)
      two_point(i, j) = inner_product(vbar[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(j)]);

  auto wick = [&](const std::vector<int>& idx) -> cplx {
    const int n = static_cast<int>(idx.size());
    if (n % 2) return 0.0;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        m(i, j) = two_point(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        m(j, i) = -m(i, j);
      }
    return pfaffian(std::move(m));
  };
  auto indices = [](unsigned mask, int size, int offset) {
    std::vector<int> out;
    for (int i = 0; i < size; ++i)
      if (mask & (1U << i)) out.push_back(i + offset);
    return out;
  };
  // X Omega and X* Omega for every sub-word X.
  auto apply = [&](const std::vector<int>& idx, bool adjoint) {
    FockVector x = vacuum(basis);
    if (adjoint)
      for (int i : idx) x = phi[static_cast<std::size_t>(i)].adjoint() * x;
    else
      for (auto it = idx.rbegin(); it != idx.rend(); ++it) x = phi[static_cast<std::size_t>(*it)] * x;
    return x;
  };

  struct SubWord {
    unsigned mask;
    std::vector<int> idx;
    FockVector vac, star_vac;  // X Omega and X* Omega
  };
  auto sub_words = [&](int size, int offset) {
    std::vector<SubWord> out;
    for (unsigned mask = 0; mask < (1U << size); ++mask) {
      if (std::popcount(mask) > options.max_degree) continue;
      std::vector<int> idx = indices(mask, size, offset);
      FockVector vac = apply(idx, false), star = apply(idx, true);
      out.push_back({mask, std::move(idx), std::move(vac), std::move(star)});
    }
    return out;
  };
  const std::vector<SubWord> as = sub_words(na, 0), bs = sub_words(nb, na);

  double worst_matrix = 0.0, worst_pfaffian = 0.0, worst_route = 0.0;
  for (const SubWord& x : as) {
    for (const SubWord& y : bs) {
      const cplx ab = inner(x.star_vac, y.vac), ba = inner(y.star_vac, x.vac);
      std::vector<int> iab = x.idx, iba = y.idx;
      iab.insert(iab.end(), y.idx.begin(), y.idx.end());
      iba.insert(iba.end(), x.idx.begin(), x.idx.end());
      const cplx ab_w = wick(iab), ba_w = wick(iba);
      const double res_m = std::abs(ab - ba), res_w = std::abs(ab_w - ba_w);
      const double route = std::max(std::abs(ab - ab_w), std::abs(ba - ba_w));
      worst_matrix = std::max(worst_matrix, res_m);
      worst_pfaffian = std::max(worst_pfaffian, res_w);
      worst_route = std::max(worst_route, route);
      r.checks.push_back(entry(mask_name("A", x.mask, na) + mask_name("B", y.mask, nb), res_m, options.tol,
                               options.assert_zero,
                               {{"AB", cplx_json(ab)}, {"BA", cplx_json(ba)}, {"pfaffian_residual", res_w}}));
    }
  }
  r.checks.push_back(entry("max residual (matrix)", worst_matrix, options.tol, options.assert_zero));
  r.checks.push_back(entry("max residual (pfaffian)", worst_pfaffian, options.tol, options.assert_zero));
  r.checks.push_back(entry("matrix vs pfaffian", worst_route, 1e-9));
  r.notes["negative_control"] = !options.assert_zero;
  return r;
}

LocalityReport relative_locality_check(const TestFunction& f, const TestFunction& g, const BasisPtr& basis,
                                       double identity_tol, double locality_tol) {
  LocalityReport r;
  r.experiment = "relative_locality";
  r.functions = json::array({to_json(f), to_json(g)});
  const GridPtr& grid = basis->grid();
  const FockOperator twisted = twisted_field(f, basis), phig = field(g, basis);
  const FockOperator c = commutator(twisted, phig);
  const cplx scalar = commutator_value(f, g, grid);
  r.checks.push_back(entry("[phi^(f), phi(g)] - scalar Z", (c - scalar * parity_Z(basis)).norm(), identity_tol, true,
                           {{"scalar", cplx_json(scalar)}}));
  const bool separated = spacelike_separated(f.support(), g.support());
  r.checks.push_back(entry("|[phi^(f), phi(g)]|", c.norm(), locality_tol, separated, {{"spacelike", separated}}));
  r.checks.push_back(entry("|scalar|", std::abs(scalar), locality_tol, separated, {{"spacelike", separated}}));
  return r;
}

// ---------------------------------------------------------------- string localization

LocalityReport string_locality_check(const StringField& field_data, const std::vector<TestFunction>& probes,
                                     const BasisPtr& basis, const StringLocalityOptions& options) {
  if (field_data.side != StringSide::LowerVanishing)
    throw PreconditionError("string_locality_check: h must be built from the lower-vanishing k");
  const GridPtr& grid = basis->grid();
  const int d = grid->config().d;
  const Region w1 = Region::right_wedge(wedge_apex(d, field_data.origin));
  const Region w2 = Region::right_wedge(wedge_apex(d, field_data.origin + field_data.a));
  for (const TestFunction& f : probes)
    if (!region_within(f.support(), w2))
      throw PreconditionError("string_locality_check: probe '" + f.label() + "' is not supported in W2");

  LocalityReport r;
  r.experiment = "string_locality";
  r.notes["W1"] = w1.to_json();
  r.notes["W2"] = w2.to_json();
  r.functions.push_back(to_json(field_data.h));

  const TestFunction& h = field_data.h;
  const OneParticleVector hv = restrict_to_shell(h, grid), hbar = restrict_to_shell(conjugate(h), grid);
  const FockOperator phih = field(hv, hbar, basis, "h");
  const double hscale = field_scale(hv, hbar);

  r.checks.push_back(entry("h localized in W1", region_within(h.support(), w1) ? 0.0 : 1.0, 0.5, true,
                           {{"support", h.support().to_json()}}));
  const double vac = norm(phih * vacuum(basis));
  const double ratio = vac / phih.norm();
  r.checks.push_back(lower_bound_entry("|phi(h) Omega| / |phi(h)|", ratio, 0.1, {{"phi_h_omega", vac}}));

  auto probe_entry = [&](const TestFunction& f, const std::string& name, bool asserted) {
    const OneParticleVector fv = restrict_to_shell(f, grid);
    const OneParticleVector fbar = f.is_real() ? fv : restrict_to_shell(conjugate(f), grid);
    const cplx scalar = inner_product(fbar, hv) + inner_product(hbar, fv);
    const double scale = hscale * field_scale(fv, fbar);
    const FockOperator anti = anticommutator(phih, field(fv, fbar, basis, f.label()));
    r.functions.push_back(to_json(f));
    r.checks.push_back(entry(name, std::abs(scalar) / scale, options.tol, asserted,
                             {{"scalar", cplx_json(scalar)}, {"operator_norm", anti.norm()},
                              {"identity_residual", (anti - scalar * identity(basis)).norm()}}));
  };
  for (std::size_t i = 0; i < probes.size(); ++i) probe_entry(probes[i], "probe " + std::to_string(i), true);
  for (std::size_t i = 0; i < options.controls.size(); ++i)
    probe_entry(options.controls[i], "control " + std::to_string(i), false);

  // Pauli-Jordan profile: reference on the slab at x0 = 0, tested inside W2.
  std::vector<Eigen::VectorXd> inside = options.profile_points;
  if (inside.empty()) {
    for (int i = 0; i < 24; ++i) {
      Eigen::VectorXd x = wedge_apex(d, field_data.origin + field_data.a + 0.05 + 0.25 * i);
      x[0] = (i % 3 - 1) * 0.5 * (x[1] - field_data.origin - field_data.a);
      inside.push_back(x);
    }
  }
  for (const Eigen::VectorXd& x : inside)
    if (!w2.contains(x)) throw PreconditionError("string_locality_check: profile point outside W2");
  std::vector<Eigen::VectorXd> reference;
  for (int i = 1; i < 32; ++i) reference.push_back(wedge_apex(d, field_data.origin + field_data.a * i / 32.0));
  double ref = 0.0;
  for (cplx z : pauli_jordan_profile(h, reference, grid)) ref = std::max(ref, std::abs(z));
  double worst = 0.0;
  for (cplx z : pauli_jordan_profile(h, inside, grid)) worst = std::max(worst, std::abs(z));
  r.checks.push_back(entry("Pauli-Jordan profile in W2", ref > 0.0 ? worst / ref : worst, options.tol, true,
                           {{"max_inside", worst}, {"max_slab", ref}, {"points", inside.size()}}));
  return r;
}

NetElement local_net_element(const std::vector<StringField>& hs, int degree, const std::vector<TestFunction>& probes,
                             const BasisPtr& basis, double tol) {
  if (degree < 0) throw ConfigurationError("local_net_element: degree must be nonnegative");
  if (degree > 0 && hs.empty()) throw ConfigurationError("local_net_element: no generators");
  const GridPtr& grid = basis->grid();
  const int d = grid->config().d;
  double origin = hs.empty() ? 0.0 : hs.front().origin, a = hs.empty() ? 0.0 : hs.front().a;
  for (const StringField& s : hs) {
    if (s.side != StringSide::LowerVanishing)
      throw PreconditionError("local_net_element: generators must use the lower-vanishing k");
    if (std::abs(s.origin + s.a - origin - a) > 1e-12)
      throw PreconditionError("local_net_element: generators must share the wedge W2");
    origin = std::min(origin, s.origin);
  }
  const Region w1 = Region::right_wedge(wedge_apex(d, origin));
  const Region w2 = Region::right_wedge(wedge_apex(d, origin + a));
  if (!hs.empty())
    for (const TestFunction& f : probes)
      if (!region_within(f.support(), w2))
        throw PreconditionError("local_net_element: probe '" + f.label() + "' is not supported in W2");

  NetElement out{identity(basis), {}};
  LocalityReport& r = out.report;
  r.experiment = "local_net_element";
  r.notes["degree"] = degree;
  r.notes["even"] = degree % 2 == 0;
  std::vector<FockOperator> fields;
  double in_w1 = 0.0;
  for (const StringField& s : hs) {
    r.functions.push_back(to_json(s.h));
    fields.push_back(field(restrict_to_shell(s.h, grid), restrict_to_shell(conjugate(s.h), grid), basis, s.h.label()));
    if (!region_within(s.h.support(), w1)) in_w1 = 1.0;
  }
  out.op = monomial(fields, degree, basis);
  r.checks.push_back(entry("generators localized in W1", in_w1, 0.5));
  const bool even = degree % 2 == 0;
  const double mnorm = out.op.norm();
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const FockOperator phif = field(probes[i], basis);
    r.functions.push_back(to_json(probes[i]));
    r.checks.push_back(entry("[M, phi(probe " + std::to_string(i) + ")]",
                             relative(commutator(out.op, phif), mnorm * phif.norm()), tol, even));
  }
  return out;
}

std::vector<StringField> region_generators(const NetRegion& region, const ModelConfig& config, int count) {
  const double width = region.hi - region.lo;
  if (!(width > 0.0)) throw ConfigurationError("region_generators: empty interval");
  if (count < 1) throw ConfigurationError("region_generators: need at least one generator");
  std::vector<StringField> out;
  for (int j = 0; j < count; ++j) {
    const double c = width * (j + 1) / (count + 1);
    const double radius = 0.9 * std::min({c, width - c, 0.4 * width});
    Eigen::VectorXd center = Eigen::VectorXd::Zero(config.d - 1);
    center[0] = c;
    const TestFunction l = bump(config.d - 1, center, radius, true).with_label("l" + std::to_string(j));
    out.push_back(shift_string(string_function(width, l, StringSide::LowerVanishing, config), region.lo));
    out.back().h = out.back().h.with_label("h" + std::to_string(j));
  }
  return out;
}

std::vector<TestFunction> region_probes(const NetRegion& region, int count) {
  std::vector<TestFunction> out;
  for (int j = 0; j < count; ++j) {
    Eigen::VectorXd c(2);
    c << 0.3 * ((j % 3) == 1 ? 1 : (j % 3) == 2 ? -1 : 0), region.hi + 1.0 + 0.75 * j;
    out.push_back(bump(2, c, 0.3).with_label("probe" + std::to_string(j)));
  }
  return out;
}

LocalityReport isotony_and_locality_scan(const NetScanConfig& config, const ModelConfig& model, const GridPtr& grid) {
  if (model.d != 2) throw PreconditionError("isotony_and_locality_scan: d = 2 only");
  LocalityReport r;
  r.experiment = "isotony_and_locality";
  auto region_json = [](const NetRegion& x) { return json::array({x.lo, x.hi}); };

  for (std::size_t i = 0; i < config.nested.size(); ++i) {
    const auto& [small, large] = config.nested[i];
    if (small.lo < large.lo || small.hi > large.hi)
      throw ConfigurationError("isotony_and_locality_scan: nested pair " + std::to_string(i) + " is not nested");
    const std::vector<StringField> gens = region_generators(small, model);
    const std::vector<TestFunction> probes = region_probes(large);
    std::vector<TestFunction> fs;
    for (const auto& s : gens) fs.push_back(s.h);
    fs.insert(fs.end(), probes.begin(), probes.end());
    const BasisPtr basis = build_modes_for(fs, grid, config.mode_tol);
    std::vector<FockOperator> fields;
    for (const auto& s : gens) fields.push_back(field(s.h, basis));
    const FockOperator m = monomial(fields, 2, basis);
    double worst = 0.0;
    for (const TestFunction& f : probes) {
      const FockOperator phif = field(f, basis);
      worst = std::max(worst, relative(commutator(m, phif), m.norm() * phif.norm()));
    }
    const bool embeds = small.lo >= large.lo;  // W1 of the smaller region lies in W1 of the larger
    r.checks.push_back(entry("nested " + std::to_string(i) + ": commutation with W2 probes", worst, config.tol, true,
                             {{"small", region_json(small)}, {"large", region_json(large)}}));
    r.checks.push_back(entry("nested " + std::to_string(i) + ": W1 containment", embeds ? 0.0 : 1.0, 0.5));
  }

  for (std::size_t i = 0; i < config.spacelike.size(); ++i) {
    const auto& [x, y] = config.spacelike[i];
    if (!(x.hi <= y.lo || y.hi <= x.lo))
      throw ConfigurationError("isotony_and_locality_scan: spacelike pair " + std::to_string(i) + " overlaps");
    const std::vector<StringField> gx = region_generators(x, model), gy = region_generators(y, model);
    std::vector<TestFunction> fs;
    for (const auto& s : gx) fs.push_back(s.h);
    for (const auto& s : gy) fs.push_back(s.h);
    const BasisPtr basis = build_modes_for(fs, grid, config.mode_tol);
    std::vector<FockOperator> fx, fy;
    for (const auto& s : gx) fx.push_back(field(s.h, basis));
    for (const auto& s : gy) fy.push_back(field(s.h, basis));
    const FockOperator mx = monomial(fx, 2, basis), my = monomial(fy, 2, basis);
    double anti = 0.0;
    for (const auto& p : fx)
      for (const auto& q : fy) anti = std::max(anti, relative(anticommutator(p, q), p.norm() * q.norm()));
    r.checks.push_back(entry("spacelike " + std::to_string(i) + ": [M_x, M_y]",
                             relative(commutator(mx, my), mx.norm() * my.norm()), config.tol, true,
                             {{"x", region_json(x)}, {"y", region_json(y)}, {"generator_anticommutators", anti}}));
  }
  return r;
}

}  // namespace nlf
