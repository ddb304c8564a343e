#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nlf/mass_shell.hpp"
#include "nlf/position.hpp"
#include "nlf/testfn.hpp"

namespace {

using nlf::cplx;

const nlf::ModelConfig kModel{2, 1.0};

Eigen::VectorXd v2(double a, double b) { return Eigen::Vector2d(a, b); }

double phi(double u) { return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0; }

}  // namespace

TEST(PositionProfile, BumpRoundTripMatchesDirectFormula) {
  const Eigen::Vector2d c(0.3, -0.5);
  const double radius = 0.8, rho = radius / std::sqrt(2.0);
  const nlf::TestFunction f = nlf::bump(2, c, radius);
  const std::vector<Eigen::VectorXd> pts = nlf::tensor_points(v2(-0.5, -1.3), v2(1.1, 0.3), 9);
  const std::vector<cplx> got = nlf::position_profile(f, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double ref = phi((pts[i][0] - c[0]) / rho) * phi((pts[i][1] - c[1]) / rho);
    EXPECT_NEAR(std::abs(got[i] - ref), 0.0, 1e-8) << pts[i].transpose();
  }
}

TEST(PositionProfile, SeedBumpIsSpatialSecondDerivative) {
  const Eigen::Vector2d c(0.5, 1.0);
  const double radius = 0.5, rho = radius / std::sqrt(2.0), h = 1e-3;
  const nlf::TestFunction f = nlf::seed_bump(2, c, radius);
  const auto direct = [&](double x0, double x1) { return phi((x0 - c[0]) / rho) * phi((x1 - c[1]) / rho); };
  const std::vector<Eigen::VectorXd> pts = nlf::tensor_points(v2(0.2, 0.7), v2(0.8, 1.3), 9);
  const std::vector<cplx> got = nlf::position_profile(f, pts);
  double peak = 0.0;
  for (const cplx& z : got) peak = std::max(peak, std::abs(z));
  ASSERT_GT(peak, 0.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double x0 = pts[i][0], x1 = pts[i][1];
    const double ref = (direct(x0, x1 + h) - 2.0 * direct(x0, x1) + direct(x0, x1 - h)) / (h * h);
    EXPECT_LT(std::abs(got[i] - ref), 1e-4 * peak) << pts[i].transpose();
  }
}

TEST(PositionProfile, BumpSupportCheck) {
  const nlf::TestFunction f = nlf::bump(2, v2(0.0, 1.0), 0.5);
  const nlf::SupportCheck s =
      nlf::support_check(f, nlf::tensor_points(v2(-1.0, 0.0), v2(1.0, 2.0), 41), f.support());
  EXPECT_GT(s.outside_count, 0);
  EXPECT_LT(s.ratio, 1e-6);
}

TEST(PositionProfile, CentralSequencePairShrinksIntoBall) {
  const nlf::TestFunction h = nlf::seed_bump(2, v2(0.0, 0.0), 0.5);
  for (int n : {1, 2, 3}) {
    const nlf::GridPtr grid =
        nlf::build_grid(kModel, {.nodes = 4096, .order = 16, .theta_max = 7.0 + 2.0 * std::log(n), .grading = 1.0});
    const nlf::CentralSequencePair pair = nlf::central_sequence_pair(n, h, grid);
    const double r = 1.0 / n;
    const std::vector<Eigen::VectorXd> pts = nlf::tensor_points(v2(-1.5 * r, -1.5 * r), v2(1.5 * r, 1.5 * r), 31);
    for (const nlf::TestFunction* f : {&pair.f1, &pair.f2}) {
      const nlf::SupportCheck s = nlf::support_check(*f, pts, nlf::Region::ball(v2(0.0, 0.0), r));
      EXPECT_LT(s.ratio, 1e-5) << "n = " << n;
      EXPECT_TRUE(nlf::region_within(f->support(), nlf::Region::ball(v2(0.0, 0.0), r + 1e-12)));
    }
  }
}

TEST(TranslationProperty, InnerProductsAreInvariant) {
  const nlf::GridPtr grid =
      nlf::build_grid(kModel, {.nodes = 16384, .order = 16, .theta_max = 7.0, .grading = 1.0});
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> pos(-2.0, 2.0), rad(0.3, 0.8), mom(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const nlf::TestFunction f = nlf::modulate(nlf::bump(2, v2(pos(rng), pos(rng)), rad(rng)), v2(mom(rng), mom(rng)));
    const nlf::TestFunction g = nlf::bump(2, v2(pos(rng), pos(rng)), rad(rng));
    const Eigen::VectorXd a = v2(pos(rng), pos(rng));
    const cplx before = nlf::inner_product(nlf::restrict_to_shell(f, grid), nlf::restrict_to_shell(g, grid));
    const cplx after = nlf::inner_product(nlf::restrict_to_shell(nlf::translate(f, a), grid),
                                          nlf::restrict_to_shell(nlf::translate(g, a), grid));
    EXPECT_LT(std::abs(before - after), 1e-14) << trial;
  }
}
