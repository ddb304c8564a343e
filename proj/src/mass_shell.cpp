#include "nlf/mass_shell.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "nlf/errors.hpp"
#include "nlf/testfn.hpp"

namespace nlf {

void ModelConfig::validate() const {
  if (d < 2) throw ConfigurationError("model: spacetime dimension must be at least 2");
  if (d > 4) throw ConfigurationError("model: dimensions above 4 are not supported");
  if (!(m > 0.0) || !std::isfinite(m)) throw ConfigurationError("model: mass must be positive");
}

namespace {

// Composite rule with `nodes` points: one panel when nodes <= order.
QuadratureRule axis_rule(double lo, double hi, const GridSpec& spec) {
  if (spec.nodes < 8) throw ConfigurationError("grid: at least 8 nodes per axis required");
  if (spec.order < 1) throw ConfigurationError("grid: panel order must be positive");
  if (spec.nodes <= spec.order) return composite_gauss_legendre(lo, hi, 1, spec.nodes);
  if (spec.nodes % spec.order != 0) {
    std::ostringstream os;
    os << "grid: " << spec.nodes << " nodes is not a multiple of the panel order " << spec.order;
    throw ConfigurationError(os.str());
  }
  return composite_gauss_legendre(lo, hi, spec.nodes / spec.order, spec.order);
}

// Forces exact mirror symmetry x[n-1-i] = -x[i] on a rule over a symmetric interval.
void symmetrize(QuadratureRule& rule) {
  const std::size_t n = rule.nodes.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    const double x = 0.5 * (rule.nodes[i] - rule.nodes[n - 1 - i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[n - 1 - i]);
    rule.nodes[i] = x;
    rule.nodes[n - 1 - i] = -x;
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
}

// Solves s = theta + g sinh(theta) for theta.
double ungrade(double s, double g) {
  double th = std::asinh(s / (1.0 + g));
  if (g > 0.0) th = std::copysign(std::min(std::abs(s), std::asinh(std::abs(s) / g)), s);
  for (int it = 0; it < 100; ++it) {
    const double f = th + g * std::sinh(th) - s;
    const double step = f / (1.0 + g * std::cosh(th));
    th -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(th))) break;
  }
  return th;
}

}  // namespace

MassShellGrid::MassShellGrid(const ModelConfig& config, const GridSpec& spec) : config_(config), spec_(spec) {
  config_.validate();
  const double m = config_.m;
  if (config_.d == 2) {
    kind_ = GridKind::Rapidity;
    if (!(spec.theta_max > 0.0)) throw ConfigurationError("grid: theta_max must be positive");
    if (!(spec.grading >= 0.0)) throw ConfigurationError("grid: grading must be nonnegative");
    const double g = spec.grading;
    const double smax = spec.theta_max + g * std::sinh(spec.theta_max);
    QuadratureRule rule = axis_rule(-smax, smax, spec);
    symmetrize(rule);
    const int n = static_cast<int>(rule.nodes.size());
    momenta_.resize(n, 1);
    omega_.resize(n);
    weights_.resize(n);
    rapidity_.resize(n);
    for (int i = 0; i < n; ++i) {
      const double th = ungrade(rule.nodes[static_cast<std::size_t>(i)], g);
      rapidity_[i] = th;
      momenta_(i, 0) = m * std::sinh(th);
      omega_[i] = m * std::cosh(th);
      // dp/omega = dtheta = ds / (1 + g cosh theta)
      weights_[i] = std::numbers::pi * rule.weights[static_cast<std::size_t>(i)] / (1.0 + g * std::cosh(th));
    }
    mirror_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) mirror_[static_cast<std::size_t>(i)] = n - 1 - i;
    return;
  }

  kind_ = GridKind::Tensor;
  const double cutoff = spec.cutoff > 0.0 ? spec.cutoff : 8.0 * m;
  if (!(cutoff > m)) throw ConfigurationError("grid: momentum cutoff must exceed the mass");
  QuadratureRule rule = axis_rule(-cutoff, cutoff, spec);
  symmetrize(rule);
  const int k = static_cast<int>(rule.nodes.size());
  const int dim = config_.d - 1;
  int total = 1;
  for (int a = 0; a < dim; ++a) total *= k;
  momenta_.resize(total, dim);
  omega_.resize(total);
  weights_.resize(total);
  mirror_.resize(static_cast<std::size_t>(total));
  for (int idx = 0; idx < total; ++idx) {
    int rest = idx, mirror = 0, stride = 1;
    double w = 1.0, p2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      const int j = rest % k;
      rest /= k;
      const double p = rule.nodes[static_cast<std::size_t>(j)];
      momenta_(idx, a) = p;
      p2 += p * p;
      w *= rule.weights[static_cast<std::size_t>(j)];
      mirror += (k - 1 - j) * stride;
      stride *= k;
    }
    omega_[idx] = std::sqrt(p2 + m * m);
    weights_[idx] = std::numbers::pi * w / omega_[idx];
    mirror_[static_cast<std::size_t>(idx)] = mirror;
  }
}

GridPtr build_grid(const ModelConfig& config, const GridSpec& spec) {
  return std::make_shared<const MassShellGrid>(config, spec);
}

double OneParticleVector::norm() const { return std::sqrt(std::max(0.0, inner_product(*this, *this).real())); }

namespace {

void require_same_grid(const OneParticleVector& u, const OneParticleVector& v) {
  if (!u.grid || u.grid != v.grid) throw StructuralError("one-particle vectors live on different grids");
}

}  // namespace

OneParticleVector operator+(const OneParticleVector& u, const OneParticleVector& v) {
  require_same_grid(u, v);
  return {u.grid, u.values + v.values};
}

OneParticleVector operator-(const OneParticleVector& u, const OneParticleVector& v) {
  require_same_grid(u, v);
  return {u.grid, u.values - v.values};
}

OneParticleVector operator*(cplx s, const OneParticleVector& u) { return {u.grid, s * u.values}; }

OneParticleVector restrict_to_shell(const TestFunction& f, const GridPtr& grid) {
  if (f.spatial() || f.dim() != grid->config().d)
    throw StructuralError("restrict: function '" + f.label() + "' is not a spacetime function of the grid dimension");
  const int n = grid->size();
  const int d = grid->config().d;
  OneParticleVector out{grid, Eigen::VectorXcd(n)};
  std::vector<double> p(static_cast<std::size_t>(d));
  for (int i = 0; i < n; ++i) {
    p[0] = grid->omega()[i];
    for (int a = 1; a < d; ++a) p[static_cast<std::size_t>(a)] = grid->momenta()(i, a - 1);
    const cplx v = f.evaluate(p);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream os;
      os << "restrict: non-finite value of '" << f.label() << "' at node " << i << " (p0 = " << p[0] << ")";
      throw EvaluationError(os.str());
    }
    out.values[i] = v;
  }
  return out;
}

cplx inner_product(const OneParticleVector& u, const OneParticleVector& v) {
  require_same_grid(u, v);
  const Eigen::VectorXd& w = u.grid->weights();
  cplx sum = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) sum += w[i] * std::conj(u.values[i]) * v.values[i];
  return sum;
}

cplx commutator_value(const TestFunction& f, const TestFunction& g, const GridPtr& grid) {
  const OneParticleVector fv = restrict_to_shell(f, grid), gv = restrict_to_shell(g, grid);
  const OneParticleVector fbar = restrict_to_shell(conjugate(f), grid), gbar = restrict_to_shell(conjugate(g), grid);
  return inner_product(fbar, gv) - inner_product(gbar, fv);
}

cplx anticommutator_value(const TestFunction& f, const TestFunction& g, const GridPtr& grid) {
  const OneParticleVector fv = restrict_to_shell(f, grid), gv = restrict_to_shell(g, grid);
  const OneParticleVector fbar = restrict_to_shell(conjugate(f), grid), gbar = restrict_to_shell(conjugate(g), grid);
  return inner_product(gbar, fv) + inner_product(fbar, gv);
}

std::vector<cplx> pauli_jordan_profile(const TestFunction& h, const std::vector<Eigen::VectorXd>& points,
                                       const GridPtr& grid) {
  if (points.empty()) throw StructuralError("pauli_jordan_profile: empty point list");
  const OneParticleVector hv = restrict_to_shell(h, grid);
  const OneParticleVector hbar = restrict_to_shell(conjugate(h), grid);
  std::vector<cplx> out;
  out.reserve(points.size());
  for (const Eigen::VectorXd& x : points) {
    if (x.size() != grid->config().d) throw StructuralError("pauli_jordan_profile: point dimension mismatch");
    // The point source is real, so it is its own conjugate.
    const OneParticleVector dv = restrict_to_shell(point_source(x), grid);
    out.push_back(inner_product(dv, hv) + inner_product(hbar, dv));
  }
  return out;
}

}  // namespace nlf
