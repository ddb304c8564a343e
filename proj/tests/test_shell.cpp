#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nlf/errors.hpp"
#include "nlf/mass_shell.hpp"
#include "nlf/testfn.hpp"
#include "oracles.hpp"

namespace {

using nlf::cplx;
using Eigen::Vector2d;

const nlf::ModelConfig kModel{2, 1.0};

nlf::GridPtr default_grid() {
  static const nlf::GridPtr g =
      nlf::build_grid(kModel, {.nodes = 16384, .order = 16, .theta_max = 7.0, .cutoff = 0.0, .grading = 1.0});
  return g;
}

Eigen::VectorXd v2(double a, double b) { return Vector2d(a, b); }

struct RandomBump {
  Vector2d center;
  double radius;
  Vector2d q;
};

// Centers in [-2, 2]^2, radii in [0.3, 0.8], modulations in [-1, 1]^2.
RandomBump draw(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-2.0, 2.0), rad(0.3, 0.8), mom(-1.0, 1.0);
  return {{pos(rng), pos(rng)}, rad(rng), {mom(rng), mom(rng)}};
}

}  // namespace

TEST(Bump, TransformMatchesQuadratureOracle) {
  const Vector2d c(0.4, -1.3);
  const nlf::TestFunction f = nlf::bump(2, c, 0.7);
  for (auto [p0, p1] : {std::pair{0.0, 0.0}, {1.2, -0.4}, {-3.0, 7.5}, {20.0, 15.0}}) {
    const cplx ref = oracle::bump2(c, 0.7, p0, p1);
    EXPECT_LT(std::abs(f.evaluate(v2(p0, p1)) - ref), 1e-13) << p0 << "," << p1;
  }
}

TEST(Bump, ModulationShiftsMomentum) {
  const Vector2d c(0.0, 0.5), q(0.3, -0.8);
  const nlf::TestFunction f = nlf::modulate(nlf::bump(2, c, 0.5), q);
  EXPECT_FALSE(f.is_real());
  const cplx ref = oracle::bump2(c, 0.5, 1.0 + q[0], 2.0 + q[1]);
  EXPECT_LT(std::abs(f.evaluate(v2(1.0, 2.0)) - ref), 1e-13);
}

TEST(Bump, RejectsBadInput) {
  EXPECT_THROW(nlf::bump(2, v2(0, 0), -1.0), nlf::ConfigurationError);
  EXPECT_THROW(nlf::bump(3, v2(0, 0), 1.0), nlf::ConfigurationError);
}

TEST(MassShell, InnerProductMatchesAdaptiveOracle) {
  const nlf::GridPtr grid = default_grid();
  const Vector2d cf(0.0, 0.5), cg(0.3, -0.4);
  const nlf::TestFunction f = nlf::bump(2, cf, 0.6), g = nlf::bump(2, cg, 0.45);
  const cplx got = nlf::inner_product(nlf::restrict_to_shell(f, grid), nlf::restrict_to_shell(g, grid));
  const cplx ref = oracle::shell_inner([&](double p0, double p1) { return oracle::bump2(cf, 0.6, p0, p1); },
                                       [&](double p0, double p1) { return oracle::bump2(cg, 0.45, p0, p1); }, 1.0);
  EXPECT_LT(std::abs(got - ref), 1e-10 * std::abs(ref)) << got << " vs " << ref;
}

TEST(MassShell, GridIntegratesLorentzInvariantMeasure) {
  // The weights carry pi dp / omega, and pi int dp / omega e^{-omega} = 2 pi K_0(1).
  const nlf::GridPtr grid = default_grid();
  double s = 0.0;
  for (int i = 0; i < grid->size(); ++i) s += grid->weights()[i] * std::exp(-grid->omega()[i]);
  EXPECT_NEAR(s, 2.0 * std::numbers::pi * 0.42102443824070834, 1e-12);
}

TEST(MassShell, MirrorNodes) {
  const nlf::GridPtr grid = default_grid();
  for (int i : {0, 17, grid->size() / 2, grid->size() - 1}) {
    const int j = grid->mirror(i);
    EXPECT_DOUBLE_EQ(grid->momenta()(j, 0), -grid->momenta()(i, 0));
    EXPECT_EQ(grid->mirror(j), i);
  }
}

TEST(MassShell, RejectsInvalidGrids) {
  EXPECT_THROW(nlf::build_grid(kModel, {.nodes = 100, .order = 16}), nlf::ConfigurationError);
  EXPECT_THROW(nlf::build_grid(kModel, {.nodes = 4, .order = 16}), nlf::ConfigurationError);
  EXPECT_THROW(nlf::build_grid({2, -1.0}, {}), nlf::ConfigurationError);
}

TEST(MassShellProperty, HermitianTranslationConjugation) {
  const nlf::GridPtr grid = default_grid();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> shift(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const RandomBump a = draw(rng), b = draw(rng);
    const nlf::TestFunction f = nlf::modulate(nlf::bump(2, a.center, a.radius), a.q);
    const nlf::TestFunction g = nlf::bump(2, b.center, b.radius);
    const nlf::OneParticleVector vf = nlf::restrict_to_shell(f, grid), vg = nlf::restrict_to_shell(g, grid);
    const cplx fg = nlf::inner_product(vf, vg), gf = nlf::inner_product(vg, vf);
    EXPECT_LT(std::abs(fg - std::conj(gf)), 1e-15);

    const Eigen::Vector2d t(shift(rng), shift(rng));
    const nlf::OneParticleVector vt = nlf::restrict_to_shell(nlf::translate(f, t), grid);
    double worst = 0.0;
    for (int i = 0; i < grid->size(); i += 97) {
      const double w = grid->omega()[i], p = grid->momenta()(i, 0);
      const cplx expect = std::exp(cplx(0.0, w * t[0] - p * t[1])) * vf.values[i];
      worst = std::max(worst, std::abs(vt.values[i] - expect));
    }
    EXPECT_LT(worst, 1e-14);

    const nlf::TestFunction fc = nlf::conjugate(f);
    for (auto [p0, p1] : {std::pair{0.7, -1.1}, {2.0, 3.0}})
      EXPECT_LT(std::abs(fc.evaluate(v2(p0, p1)) - std::conj(f.evaluate(v2(-p0, -p1)))), 1e-15);

    // Commutator scalar is antisymmetric, anticommutator scalar symmetric.
    EXPECT_LT(std::abs(nlf::commutator_value(f, g, grid) + nlf::commutator_value(g, f, grid)), 1e-15);
    EXPECT_LT(std::abs(nlf::anticommutator_value(f, g, grid) - nlf::anticommutator_value(g, f, grid)), 1e-15);
  }
}

TEST(MassShellProperty, SpacelikeCommutatorVanishes) {
  const nlf::GridPtr grid = default_grid();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> t(-0.8, 0.8), gap(0.01, 2.0), r(0.2, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    const double rf = r(rng), rg = r(rng), tf = t(rng), tg = t(rng);
    // x_1 > |x_0| + radius puts each support in its wedge.
    const Vector2d cf2(tf, std::abs(tf) + rf + gap(rng)), cg2(tg, -(std::abs(tg) + rg + gap(rng)));
    const nlf::TestFunction f = nlf::bump(2, cf2, rf), g = nlf::bump(2, cg2, rg);
    const double scale = nlf::restrict_to_shell(f, grid).norm() * nlf::restrict_to_shell(g, grid).norm();
    EXPECT_LT(std::abs(nlf::commutator_value(f, g, grid)), 1e-11 * scale) << trial;
    // The anticommutator scalar does not vanish.
    EXPECT_GT(std::abs(nlf::anticommutator_value(f, g, grid)), 1e-6 * scale) << trial;
  }
}

TEST(KleinGordon, ImageVanishesOnShell) {
  const nlf::TestFunction f = nlf::modulate(nlf::bump(2, v2(0.2, 0.1), 0.5), v2(0.3, 0.2));
  const nlf::TestFunction g = nlf::klein_gordon_image(f, 1.0);
  for (double p : {-4.0, 0.0, 0.5, 3.0}) {
    const double w = std::sqrt(1.0 + p * p);
    EXPECT_LT(std::abs(g.evaluate(v2(w, p))), 1e-15);
  }
  // Off shell: (m^2 - p0^2 + p1^2) f~(p).
  EXPECT_LT(std::abs(g.evaluate(v2(2.0, 0.5)) - (1.0 - 4.0 + 0.25) * f.evaluate(v2(2.0, 0.5))), 1e-15);
}

TEST(Region, MembershipAndRelations) {
  const nlf::Region wr = nlf::Region::right_wedge(v2(0, 0)), wl = nlf::Region::left_wedge(v2(0, 0));
  EXPECT_TRUE(wr.contains(v2(0.5, 1.0)));
  EXPECT_FALSE(wr.contains(v2(1.5, 1.0)));
  EXPECT_TRUE(wl.contains(v2(0.0, -0.1)));
  const nlf::Region ball = nlf::Region::ball(v2(0.0, 2.0), 0.5);
  EXPECT_TRUE(nlf::region_within(ball, wr));
  EXPECT_FALSE(nlf::region_within(nlf::Region::ball(v2(1.0, 1.5), 0.5), wr));
  EXPECT_TRUE(nlf::spacelike_separated(ball, nlf::Region::ball(v2(0.0, -2.0), 0.5)));
  EXPECT_FALSE(nlf::spacelike_separated(ball, nlf::Region::ball(v2(2.5, 2.0), 0.5)));
  EXPECT_TRUE(nlf::spacelike_separated(wr, wl));
}

TEST(TestFunctionJson, RoundTrip) {
  const nlf::TestFunction f =
      nlf::translate(nlf::modulate(nlf::seed_bump(2, v2(0.1, 0.2), 0.4), v2(0.5, -0.5)), v2(1.0, 0.3));
  const nlf::TestFunction g = nlf::test_function_from_json(nlf::to_json(f), kModel);
  for (auto [p0, p1] : {std::pair{0.3, 0.1}, {-2.0, 4.0}})
    EXPECT_LT(std::abs(f.evaluate(v2(p0, p1)) - g.evaluate(v2(p0, p1))), 1e-15);
  EXPECT_EQ(nlf::to_json(f), nlf::to_json(g));
}

TEST(CentralSequencePair, OrthonormalForAllN) {
  const nlf::TestFunction h = nlf::seed_bump(2, v2(0.0, 0.0), 0.5);
  for (int n = 1; n <= 32; ++n) {
    // Panels scale with the momentum reach of the n-th pair.
    const int panels = 64 + 8 * n;
    const nlf::GridPtr grid = nlf::build_grid(
        kModel, {.nodes = 16 * panels, .order = 16, .theta_max = 7.0 + 2.0 * std::log(n), .grading = 1.0});
    const nlf::CentralSequencePair pair = nlf::central_sequence_pair(n, h, grid);
    const nlf::OneParticleVector v1 = nlf::restrict_to_shell(pair.f1, grid), v2v = nlf::restrict_to_shell(pair.f2, grid);
    EXPECT_NEAR(v1.norm(), 1.0, 1e-10) << n;
    EXPECT_NEAR(v2v.norm(), 1.0, 1e-10) << n;
    EXPECT_LT(std::abs(nlf::inner_product(v1, v2v).real()), 1e-10) << n;
    EXPECT_TRUE(pair.f1.is_real() && pair.f2.is_real());
  }
}

TEST(CentralSequencePair, RejectsWideSeed) {
  const nlf::TestFunction h = nlf::seed_bump(2, v2(0.0, 0.0), 0.7);
  EXPECT_THROW(nlf::central_sequence_pair(1, h, default_grid()), nlf::PreconditionError);
  EXPECT_THROW(nlf::central_sequence_pair(0, nlf::seed_bump(2, v2(0, 0), 0.5), default_grid()),
               nlf::ConfigurationError);
}

TEST(StringField, ShiftMovesEveryComponent) {
  const nlf::TestFunction l = nlf::default_string_seed(1, 1.0);
  const nlf::StringField s = nlf::string_function(1.0, l, nlf::StringSide::LowerVanishing, kModel);
  const nlf::StringField t = nlf::shift_string(s, 2.5);
  EXPECT_DOUBLE_EQ(t.origin, s.origin + 2.5);
  EXPECT_EQ(t.a, s.a);
  const double p = 0.8, w = std::sqrt(1.0 + p * p);
  EXPECT_LT(std::abs(t.h.evaluate(v2(w, p)) - std::exp(cplx(0.0, -p * 2.5)) * s.h.evaluate(v2(w, p))), 1e-14);
}
