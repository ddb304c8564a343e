#include "nlf/special.hpp"

#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_expint.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nlf {

double sine_integral(double z) { return 2.0 / std::numbers::pi * gsl_sf_Si(z); }

namespace {

// Tanh-sinh rule on the contour u(t) = t + i c (1 - t^2), t in (-1, 1).
// On this contour |e^{iku}| = e^{-k c (1-t^2)}, so the oscillatory integral
// turns into a decaying one for k >= 0. Only tau >= 0 is stored; the
// tau < 0 half contributes the complex conjugate term.
struct ContourRule {
  static constexpr double kLift = 0.5;
  static constexpr double kStep = 1.0 / 64.0;

  std::vector<double> t;
  std::vector<double> damp;  // c (1 - t^2)
  std::vector<cplx> g;       // weight * mollifier(u) * u'(t), tau > 0 doubled
  std::vector<double> log_g;  // log |g|

  ContourRule() {
    const double pi = std::numbers::pi;
    for (int j = 0;; ++j) {
      const double tau = j * kStep;
      const double s = 0.5 * pi * std::sinh(tau);
      const double sech = 1.0 / std::cosh(s);
      const double om = sech * sech;  // 1 - t^2 without cancellation
      const double tj = std::tanh(s);
      const double w = kStep * 0.5 * pi * std::cosh(tau) * om;
      const cplx one_minus_u2 = om * cplx(1.0 + kLift * kLift * om, -2.0 * kLift * tj);
      const cplx b = std::exp(-1.0 / one_minus_u2);
      const cplx du(1.0, -2.0 * kLift * tj);
      const cplx gj = w * b * du * (j == 0 ? 1.0 : 2.0);
      if (j > 0 && std::abs(gj) < 1e-300) break;
      t.push_back(tj);
      damp.push_back(kLift * om);
      g.push_back(gj);
      log_g.push_back(std::log(std::abs(gj)));
    }
  }

  double operator()(double k) const {
    const double a = std::abs(k);
    double sum = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) {
      // Terms below e^{-80} in absolute size are dropped.
      if (log_g[j] - a * damp[j] < -80.0) continue;
      const double e = std::exp(-a * damp[j]);
      const double ph = a * t[j];
      sum += e * (g[j].real() * std::cos(ph) - g[j].imag() * std::sin(ph));
    }
    return sum / std::sqrt(2.0 * std::numbers::pi);
  }
};

const ContourRule& contour_rule() {
  static const ContourRule rule;
  return rule;
}

}  // namespace

double mollifier_transform(double k) { return contour_rule()(k); }

QuadratureRule composite_gauss_legendre(double a, double b, int panels, int order) {
  if (panels < 1 || order < 1 || !(b > a)) throw std::invalid_argument("composite_gauss_legendre: bad rule");
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(order);
  QuadratureRule rule;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * order);
  rule.weights.reserve(rule.nodes.capacity());
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    for (int i = 0; i < order; ++i) {
      double x = 0.0, w = 0.0;
      gsl_integration_glfixed_point(lo, lo + width, i, &x, &w, table);
      rule.nodes.push_back(x);
      rule.weights.push_back(w);
    }
  }
  gsl_integration_glfixed_table_free(table);
  return rule;
}

}  // namespace nlf
