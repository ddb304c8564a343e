#pragma once

#include <complex>
#include <vector>

namespace nlf {

using cplx = std::complex<double>;

// Si(z) = (2/pi) * int_0^z sin(w)/w dw, so that Si(+-inf) = +-1.
double sine_integral(double z);

// B(k) = (2 pi)^{-1/2} int_{-1}^{1} exp(-1/(1-u^2)) e^{iku} du.
// Real and even in k. Absolute accuracy ~1e-14 relative to B(0).
double mollifier_transform(double k);

// Nodes and weights of a composite Gauss-Legendre rule on [a, b].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

QuadratureRule composite_gauss_legendre(double a, double b, int panels, int order);

}  // namespace nlf
