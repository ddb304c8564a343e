#pragma once

// Brute-force references used only by the tests.

#include <Eigen/Dense>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>

namespace oracle {

using cplx = std::complex<double>;

// (2 pi)^{-1/2} int_{-1}^{1} exp(-1/(1-u^2)) e^{iku} du by a 3000-point Gauss-Legendre rule.
// The integrand is flat to all orders at the ends, so the rule converges for |k| well beyond 1000.
inline double mollifier(double k) {
  static const gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(3000);
  double s = 0.0;
  for (std::size_t i = 0; i < t->n; ++i) {
    double x = 0.0, w = 0.0;
    gsl_integration_glfixed_point(-1.0, 1.0, i, &x, &w, t);
    s += w * std::exp(-1.0 / (1.0 - x * x)) * std::cos(k * x);
  }
  return s / std::sqrt(2.0 * std::numbers::pi);
}

// Transform of the product bump prod_a exp(-1/(1-((x_a-c_a)/rho)^2)) in d = 2, rho = radius / sqrt 2,
// with the convention (2 pi)^{-1} int f e^{i(p0 x0 - p1 x1)}.
inline cplx bump2(const Eigen::Vector2d& c, double radius, double p0, double p1) {
  const double rho = radius / std::sqrt(2.0);
  return rho * rho * mollifier(rho * p0) * mollifier(rho * p1) * std::exp(cplx(0.0, p0 * c[0] - p1 * c[1]));
}

// pi int dp/omega conj(f) g on the upper shell, in rapidity, by adaptive quadrature.
inline cplx shell_inner(const std::function<cplx(double, double)>& f, const std::function<cplx(double, double)>& g,
                        double m, double theta_max = 8.0) {
  struct Ctx {
    const std::function<cplx(double, double)>*f, *g;
    double m;
    bool imag;
  };
  auto integrand = [](double th, void* p) {
    const Ctx& c = *static_cast<Ctx*>(p);
    const double p0 = c.m * std::cosh(th), p1 = c.m * std::sinh(th);
    const cplx v = std::conj((*c.f)(p0, p1)) * (*c.g)(p0, p1);
    return c.imag ? v.imag() : v.real();
  };
  gsl_integration_workspace* w = gsl_integration_workspace_alloc(2000);
  double parts[2];
  for (int k = 0; k < 2; ++k) {
    Ctx ctx{&f, &g, m, k == 1};
    gsl_function fn{integrand, &ctx};
    double err = 0.0;
    gsl_integration_qag(&fn, -theta_max, theta_max, 1e-15, 1e-11, 2000, GSL_INTEG_GAUSS61, w, &parts[k], &err);
  }
  gsl_integration_workspace_free(w);
  return std::numbers::pi * cplx(parts[0], parts[1]);
}

// Pfaffian by expansion along the first row.
inline cplx pfaffian(const Eigen::MatrixXcd& a) {
  const Eigen::Index n = a.rows();
  if (n == 0) return 1.0;
  if (n % 2) return 0.0;
  cplx s = 0.0;
  for (Eigen::Index j = 1; j < n; ++j) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 1; k < n; ++k)
      if (k != j) keep.push_back(k);
    Eigen::MatrixXcd minor(n - 2, n - 2);
    for (std::size_t r = 0; r < keep.size(); ++r)
      for (std::size_t c = 0; c < keep.size(); ++c) minor(r, c) = a(keep[r], keep[c]);
    s += ((j % 2) ? 1.0 : -1.0) * a(0, j) * pfaffian(minor);
  }
  return s;
}

// Dimension of ran(E) intersected with ran(F): null space of the stacked (1 - E; 1 - F).
inline int intersection_dimension(const Eigen::MatrixXcd& e, const Eigen::MatrixXcd& f, double tol) {
  const Eigen::Index n = e.rows();
  Eigen::MatrixXcd stacked(2 * n, n);
  stacked << Eigen::MatrixXcd::Identity(n, n) - e, Eigen::MatrixXcd::Identity(n, n) - f;
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stacked);
  int count = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] < tol) ++count;
  return count;
}

// Random orthogonal projection of rank r on C^n.
inline Eigen::MatrixXcd random_projection(int n, int r, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(n, r);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < r; ++j) a(i, j) = cplx(g(rng), g(rng));
  const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  const Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, r);
  return q * q.adjoint();
}

}  // namespace oracle
