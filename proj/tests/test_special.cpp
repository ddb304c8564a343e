#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nlf/special.hpp"
#include "oracles.hpp"

namespace {

using std::numbers::pi;

// (2/pi) int_0^z sin(w)/w dw by Simpson on 4000 intervals.
double si_oracle(double z) {
  const int n = 4000;
  const double h = z / n;
  auto g = [](double w) { return w == 0.0 ? 1.0 : std::sin(w) / w; };
  double s = g(0.0) + g(z);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * g(i * h);
  return 2.0 / pi * s * h / 3.0;
}

}  // namespace

TEST(SineIntegral, ValueAtPi) {
  // int_0^pi sin(w)/w dw = 1.851937051982466...
  EXPECT_NEAR(nlf::sine_integral(pi), 2.0 / pi * 1.851937051982466, 1e-14);
}

TEST(SineIntegral, LimitsAndOddness) {
  EXPECT_EQ(nlf::sine_integral(0.0), 0.0);
  EXPECT_NEAR(nlf::sine_integral(1e6), 1.0, 1e-6);
  EXPECT_NEAR(nlf::sine_integral(-1e6), -1.0, 1e-6);
  for (double z : {0.1, 1.0, 3.7, 25.0}) EXPECT_EQ(nlf::sine_integral(-z), -nlf::sine_integral(z));
}

TEST(SineIntegral, AgreesWithSimpsonOracle) {
  for (double z : {0.05, 0.5, 2.0, 7.5, 20.0}) EXPECT_NEAR(nlf::sine_integral(z), si_oracle(z), 1e-12) << z;
}

TEST(MollifierTransform, AgreesWithAdaptiveQuadrature) {
  const double b0 = oracle::mollifier(0.0);
  for (double k : {0.0, 0.3, 1.0, 4.0, 12.5, 40.0, 100.0})
    EXPECT_NEAR(nlf::mollifier_transform(k), oracle::mollifier(k), 1e-12 * b0) << k;
}

TEST(MollifierTransform, EvenAndDecaying) {
  for (double k : {0.7, 9.0, 55.0}) EXPECT_EQ(nlf::mollifier_transform(-k), nlf::mollifier_transform(k));
  const double b0 = nlf::mollifier_transform(0.0);
  EXPECT_LT(std::abs(nlf::mollifier_transform(900.0)), 1e-13 * b0);
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  const nlf::QuadratureRule r = nlf::composite_gauss_legendre(-1.0, 2.0, 3, 8);
  ASSERT_EQ(r.nodes.size(), 24u);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], 15);
  EXPECT_NEAR(s, (std::pow(2.0, 16) - 1.0) / 16.0, 1e-9);
}

TEST(GaussLegendre, Exponential) {
  const nlf::QuadratureRule r = nlf::composite_gauss_legendre(0.0, 3.0, 4, 16);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::exp(r.nodes[i]);
  EXPECT_NEAR(s, std::exp(3.0) - 1.0, 1e-13);
}
