#include <gtest/gtest.h>

#include <random>

#include "nlf/algebra_probes.hpp"
#include "nlf/errors.hpp"
#include "oracles.hpp"

namespace {

using nlf::cplx;

const nlf::ModelConfig kModel{2, 1.0};

nlf::GridPtr grid16k() {
  static const nlf::GridPtr g =
      nlf::build_grid(kModel, {.nodes = 16384, .order = 16, .theta_max = 7.0, .cutoff = 0.0, .grading = 1.0});
  return g;
}

Eigen::VectorXd v2(double a, double b) { return Eigen::Vector2d(a, b); }

// A basis with three modes, i.e. an 8-dimensional Fock space.
nlf::BasisPtr three_modes() {
  static const nlf::BasisPtr b = nlf::build_modes_for(
      {nlf::bump(2, v2(0, 1), 0.5), nlf::bump(2, v2(0, -1), 0.5), nlf::bump(2, v2(0, 3), 0.5)}, grid16k());
  return b;
}

Eigen::MatrixXcd projector_onto(const Eigen::MatrixXcd& cols) {
  const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(cols);
  const Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(cols.rows(), cols.cols());
  return q * q.adjoint();
}

Eigen::MatrixXcd gaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = cplx(g(rng), g(rng));
  return a;
}

}  // namespace

TEST(MeetProperty, RankMatchesSubspaceIntersection) {
  const nlf::BasisPtr basis = three_modes();
  ASSERT_EQ(basis->fock_dim(), 8);
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> dim(0, 3);
  for (int trial = 0; trial < 40; ++trial) {
    // E = proj span(A, C), F = proj span(B, C) with generic A, B, C and ranks summing to at most 8.
    const int c = dim(rng), a = dim(rng) % 3, b = dim(rng) % 3;
    const Eigen::MatrixXcd cc = gaussian(8, c, rng), aa = gaussian(8, a, rng), bb = gaussian(8, b, rng);
    Eigen::MatrixXcd ac(8, a + c), bc(8, b + c);
    ac << aa, cc;
    bc << bb, cc;
    const nlf::FockOperator e{basis, a + c ? projector_onto(ac) : Eigen::MatrixXcd::Zero(8, 8), "E"};
    const nlf::FockOperator f{basis, b + c ? projector_onto(bc) : Eigen::MatrixXcd::Zero(8, 8), "F"};
    const nlf::MeetResult m = nlf::meet(e, f);
    EXPECT_EQ(m.rank, oracle::intersection_dimension(e.matrix, f.matrix, 1e-6)) << trial;
    EXPECT_EQ(m.rank, c) << trial;
    EXPECT_LT((e.matrix * m.projection.matrix - m.projection.matrix).norm(), 1e-10);
    EXPECT_LT((f.matrix * m.projection.matrix - m.projection.matrix).norm(), 1e-10);
    EXPECT_LT((m.projection.matrix * m.projection.matrix - m.projection.matrix).norm(), 1e-10);
    EXPECT_NEAR(m.projection.matrix.trace().real(), c, 1e-10);
  }
}

TEST(Meet, GenericProjectionsMeetTrivially) {
  const nlf::BasisPtr basis = three_modes();
  std::mt19937_64 rng(2);
  const nlf::FockOperator e{basis, oracle::random_projection(8, 4, rng), "E"};
  const nlf::FockOperator f{basis, oracle::random_projection(8, 4, rng), "F"};
  const nlf::MeetResult m = nlf::meet(e, f);
  EXPECT_EQ(m.rank, 0);
  EXPECT_EQ(m.projection.matrix.norm(), 0.0);
  ASSERT_FALSE(m.low_spectrum.empty());
  EXPECT_GT(m.low_spectrum.front(), 1e-8);
  EXPECT_EQ(nlf::meet(e, e).rank, 4);
}

TEST(MeetProperty, IdentityCommutativityAndDiagonalCase) {
  const nlf::BasisPtr basis = three_modes();
  std::mt19937_64 rng(19);
  std::uniform_int_distribution<int> bit(0, 1), rank(1, 6);
  const nlf::FockOperator one{basis, Eigen::MatrixXcd::Identity(8, 8), "1"};
  for (int trial = 0; trial < 20; ++trial) {
    const nlf::FockOperator e{basis, oracle::random_projection(8, rank(rng), rng), "E"};
    const nlf::FockOperator f{basis, oracle::random_projection(8, rank(rng), rng), "F"};
    EXPECT_LT((nlf::meet(e, one).projection.matrix - e.matrix).norm(), 1e-10);
    EXPECT_LT((nlf::meet(e, e).projection.matrix - e.matrix).norm(), 1e-10);
    const nlf::MeetResult ef = nlf::meet(e, f), fe = nlf::meet(f, e);
    EXPECT_EQ(ef.rank, fe.rank);
    EXPECT_LT((ef.projection.matrix - fe.projection.matrix).norm(), 1e-10);
    const int re = static_cast<int>(std::lround(e.matrix.trace().real()));
    const int rf = static_cast<int>(std::lround(f.matrix.trace().real()));
    EXPECT_LE(ef.rank, std::min(re, rf));
    // Commuting diagonal projections meet in the elementwise minimum.
    Eigen::VectorXcd de(8), df(8);
    for (int i = 0; i < 8; ++i) de[i] = bit(rng), df[i] = bit(rng);
    const nlf::FockOperator a{basis, de.asDiagonal(), "A"}, b{basis, df.asDiagonal(), "B"};
    const Eigen::VectorXcd mins = de.cwiseProduct(df);
    EXPECT_LT((nlf::meet(a, b).projection.matrix - Eigen::MatrixXcd(mins.asDiagonal())).norm(), 1e-12);
    EXPECT_EQ(nlf::meet(a, b).rank, oracle::intersection_dimension(a.matrix, b.matrix, 1e-6));
  }
}

TEST(Meet, RejectsMixedSpaces) {
  const nlf::BasisPtr other = nlf::build_modes_for({nlf::bump(2, v2(0, 0), 0.5)}, grid16k());
  const nlf::FockOperator e{three_modes(), Eigen::MatrixXcd::Identity(8, 8), "E"};
  const nlf::FockOperator f{other, Eigen::MatrixXcd::Identity(2, 2), "F"};
  EXPECT_THROW(nlf::meet(e, f), nlf::StructuralError);
}

TEST(CliffordProjection, ProjectionAndVacuumValue) {
  const nlf::GridPtr grid = grid16k();
  const nlf::CentralSequencePair pair = nlf::central_sequence_pair(1, nlf::seed_bump(2, v2(0, 0), 0.5), grid);
  const nlf::BasisPtr basis = nlf::build_modes_for({pair.f1, pair.f2}, grid);
  const cplx f1f2 = nlf::inner_product(nlf::restrict_to_shell(pair.f1, grid), nlf::restrict_to_shell(pair.f2, grid));
  for (int sign : {1, -1}) {
    const nlf::FockOperator p = nlf::clifford_projection(pair.f1, pair.f2, sign, basis);
    EXPECT_LT((p * p - p).norm(), 1e-12);
    EXPECT_LT((p.adjoint() - p).norm(), 1e-12);
    EXPECT_LT(std::abs(nlf::vacuum_expectation(p) - 0.5 * (1.0 + static_cast<double>(sign) * cplx(0, 1) * f1f2)), 1e-12);
  }
  EXPECT_THROW(nlf::clifford_projection(pair.f1, pair.f2, 2, basis), nlf::ConfigurationError);
  const nlf::TestFunction wide = nlf::scaled(2.0, pair.f1);
  EXPECT_THROW(nlf::clifford_projection(wide, pair.f2, 1, nlf::build_modes_for({wide, pair.f2}, grid)),
               nlf::NonOrthonormalPairError);
}

TEST(StIdentityProperty, HoldsForTranslatedPairs) {
  const nlf::GridPtr grid = grid16k();
  const nlf::CentralSequencePair pair = nlf::central_sequence_pair(1, nlf::seed_bump(2, v2(0, 0), 0.5), grid);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> t(-1.0, 1.0), x(-3.0, 3.0);
  for (int trial = 0; trial < 6; ++trial) {
    const Eigen::VectorXd a = v2(t(rng), x(rng));
    const nlf::TestFunction g1 = nlf::translate(pair.f1, a).with_label("g1");
    const nlf::TestFunction g2 = nlf::translate(pair.f2, a).with_label("g2");
    const nlf::BasisPtr basis = nlf::build_modes_for({pair.f1, pair.f2, g1, g2}, grid);
    const nlf::LocalityReport r = nlf::st_identity_check({pair.f1, pair.f2}, {g1, g2}, basis);
    EXPECT_TRUE(r.passed()) << r.to_json().dump();
  }
}

TEST(WeakLocality, SmallWordsAndPreconditions) {
  const nlf::GridPtr grid = grid16k();
  const std::vector<nlf::TestFunction> a = {nlf::bump(2, v2(0, 2), 0.5).with_label("a0"),
                                            nlf::bump(2, v2(0.3, 1.5), 0.4).with_label("a1")};
  const std::vector<nlf::TestFunction> b = {nlf::bump(2, v2(0, -2), 0.5).with_label("b0"),
                                            nlf::bump(2, v2(-0.2, -1.4), 0.4).with_label("b1")};
  std::vector<nlf::TestFunction> all = a;
  all.insert(all.end(), b.begin(), b.end());
  const nlf::BasisPtr basis = nlf::build_modes_for(all, grid);
  nlf::WeakLocalityOptions o;
  o.max_degree = 2;
  const nlf::LocalityReport r = nlf::weak_locality_check(a, b, basis, o);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.checks.size(), 16u + 3u);  // 4 x 4 subwords, then the summaries
  EXPECT_THROW(nlf::weak_locality_check(b, a, basis, o), nlf::PreconditionError);
}

TEST(RelativeLocality, IdentityHoldsForOverlappingSupports) {
  const nlf::GridPtr grid = grid16k();
  const nlf::TestFunction f = nlf::modulate(nlf::bump(2, v2(0.1, 0.2), 0.6), v2(0.4, 0.0)).with_label("f");
  const nlf::TestFunction g = nlf::bump(2, v2(-0.2, 0.4), 0.5).with_label("g");
  const nlf::LocalityReport r = nlf::relative_locality_check(f, g, nlf::build_modes_for({f, g}, grid));
  EXPECT_TRUE(r.passed());
  EXPECT_LT(r.checks.front().value, 1e-10);
}

TEST(CentralSequenceGrid, PanelsGrowWithN) {
  nlf::CentralSequenceOptions o;
  o.grid = {.nodes = 512, .order = 16, .theta_max = 7.0, .grading = 1.0};
  const nlf::GridSpec g1 = nlf::central_sequence_grid(o, 1, 3.0, 1.0);
  const nlf::GridSpec g8 = nlf::central_sequence_grid(o, 8, 3.0, 1.0);
  EXPECT_EQ(g1.nodes % 16, 0);
  EXPECT_GT(g8.nodes, g1.nodes);
  EXPECT_NEAR(g8.theta_max, 7.0 + 2.0 * std::log(8.0), 1e-12);
}

TEST(CentralSequence, ShortRunRecordsRowsAndBound) {
  nlf::CentralSequenceOptions o;
  o.n_max = 2;
  o.translation = v2(0.0, 3.0);
  o.grid = {.nodes = 512, .order = 16, .theta_max = 7.0, .grading = 1.0};
  const nlf::WitnessReport r = nlf::central_sequence_experiment(nlf::seed_bump(2, v2(0, 0), 0.5),
                                                                nlf::bump(2, v2(0, -4), 0.5), kModel, o);
  ASSERT_EQ(r.rows.size(), 2u);
  for (const nlf::WitnessRow& row : r.rows) {
    EXPECT_LE(row.commutator_norm, row.commutator_bound * (1.0 + 1e-8) + 1e-14);
    EXPECT_LT(row.pair_defect, 1e-10);
    EXPECT_GT(row.certified_witness, 0.99);
  }
  EXPECT_EQ(r.rows[0].meet_rank, 0);
  nlf::CentralSequenceOptions bad = o;
  bad.n_max = 0;
  EXPECT_THROW(nlf::central_sequence_experiment(nlf::seed_bump(2, v2(0, 0), 0.5), nlf::bump(2, v2(0, -4), 0.5),
                                                kModel, bad),
               nlf::ConfigurationError);
}

TEST(StringLocality, LowerFieldPassesAndUpperIsRejected) {
  const nlf::GridPtr grid = grid16k();
  const double a = 1.0;
  const nlf::TestFunction l = nlf::default_string_seed(1, a);
  const nlf::StringField lower = nlf::string_function(a, l, nlf::StringSide::LowerVanishing, kModel);
  const nlf::StringField upper = nlf::string_function(a, l, nlf::StringSide::UpperVanishing, kModel);
  const std::vector<nlf::TestFunction> probes = {nlf::bump(2, v2(0, a + 1.0), 0.5).with_label("p")};
  const nlf::BasisPtr basis = nlf::build_modes_for({lower.h, probes[0]}, grid);
  nlf::StringLocalityOptions o;
  const nlf::LocalityReport r = nlf::string_locality_check(lower, probes, basis, o);
  EXPECT_TRUE(r.passed()) << r.to_json().dump();
  EXPECT_THROW(nlf::string_locality_check(upper, probes, basis, o), nlf::PreconditionError);
  const std::vector<nlf::TestFunction> outside = {nlf::bump(2, v2(0, 0.5), 0.1).with_label("q")};
  EXPECT_THROW(nlf::string_locality_check(lower, outside, basis, o), nlf::PreconditionError);
}

TEST(LocalNet, OddMonomialIsNotLocalEvenIs) {
  const nlf::GridPtr grid = grid16k();
  const nlf::NetRegion region{0.0, 1.0};
  const std::vector<nlf::StringField> gens = nlf::region_generators(region, kModel);
  const std::vector<nlf::TestFunction> probes = nlf::region_probes(region);
  std::vector<nlf::TestFunction> fs;
  for (const nlf::StringField& g : gens) fs.push_back(g.h);
  fs.insert(fs.end(), probes.begin(), probes.end());
  const nlf::BasisPtr basis = nlf::build_modes_for(fs, grid);
  const nlf::NetElement even = nlf::local_net_element(gens, 2, probes, basis);
  EXPECT_TRUE(even.report.passed());
  const nlf::NetElement odd = nlf::local_net_element(gens, 1, probes, basis);
  double worst = 0.0;
  for (const nlf::CheckEntry& c : odd.report.checks) worst = std::max(worst, c.value);
  EXPECT_GT(worst, 0.1);
  nlf::NetScanConfig bad;
  bad.nested = {{{0.0, 2.0}, {0.0, 1.0}}};
  EXPECT_THROW(nlf::isotony_and_locality_scan(bad, kModel, grid), nlf::ConfigurationError);
}
