#include "nlf/position.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "nlf/errors.hpp"

namespace nlf {

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

// Sign of the phase e^{i sigma k x} in the inverse transform along an axis.
double inverse_sign(bool spatial, int axis) { return (spatial || axis > 0) ? 1.0 : -1.0; }

struct AxisRule {
  double k0 = 0.0, dk = 0.0;
  int count = 0;
};

// Support half-width (or decay length) contributed by the factors of one axis.
double axis_extent(const std::vector<Factor>& factors) {
  double e = 0.0;
  for (const Factor& f : factors) {
    switch (f.kind) {
      case Factor::Kind::Mollifier:
      case Factor::Kind::Exp:
      case Factor::Kind::SineIntegral:
        e += std::abs(f.scale);
        break;
      case Factor::Kind::Branch:
        e += 40.0 / std::abs(f.b);
        break;
      case Factor::Kind::Power:
        break;
    }
  }
  return e;
}

AxisRule axis_rule(const TestFunction& f, const std::vector<Factor>& factors, int axis, double xmax,
                   const ProfileSpec& spec, double extra_extent = 0.0) {
  double narrowest = 0.0;
  for (const Factor& fac : factors)
    if (fac.kind == Factor::Kind::Mollifier) narrowest = std::max(narrowest, std::abs(fac.scale));
  double cutoff = spec.cutoff;
  if (cutoff <= 0.0) {
    if (narrowest == 0.0)
      throw EvaluationError("position_profile: transform of '" + f.label() + "' does not decay along axis " +
                            std::to_string(axis));
    cutoff = spec.mollifier_reach / narrowest;
  }
  double dk = spec.spacing;
  if (dk <= 0.0) {
    const double period = 2.0 * (xmax + axis_extent(factors) + extra_extent) + 1.0;
    dk = 2.0 * std::numbers::pi / period;
  }
  AxisRule r;
  r.count = 2 * static_cast<int>(std::ceil(cutoff / dk)) + 1;
  r.dk = dk;
  r.k0 = -dk * (r.count / 2);
  return r;
}

// sum_j w g_j e^{i sigma k_j x} for each x, with a reseeded phase recurrence.
std::vector<cplx> inverse_sums(const std::vector<cplx>& g, const AxisRule& rule, double sigma,
                               const std::vector<double>& xs) {
  std::vector<cplx> out(xs.size());
  constexpr int kReseed = 512;
  for (std::size_t p = 0; p < xs.size(); ++p) {
    const double x = xs[p];
    const cplx step = std::polar(1.0, sigma * rule.dk * x);
    cplx sum = 0.0, phase;
    for (int j = 0; j < rule.count; ++j) {
      if (j % kReseed == 0) phase = std::polar(1.0, sigma * (rule.k0 + j * rule.dk) * x);
      sum += g[static_cast<std::size_t>(j)] * phase;
      phase *= step;
    }
    out[p] = sum * rule.dk * kInvSqrt2Pi;
  }
  return out;
}

bool separable(const TestFunction& f, const Term& t) {
  const int spatial_axes = f.spatial() ? f.dim() : f.dim() - 1;
  return !t.joint || spatial_axes == 1;
}

// Folds a one-axis joint branch into a plain factor on that axis.
std::vector<Factor> axis_factors(const TestFunction& f, const Term& t, int axis) {
  std::vector<Factor> fs = t.axes[static_cast<std::size_t>(axis)];
  const int joint_axis = f.spatial() ? 0 : 1;
  if (t.joint && axis == joint_axis)
    fs.push_back({.kind = Factor::Kind::Branch, .scale = t.joint->s, .b = t.joint->t * t.joint->mass,
                  .exponent = t.joint->exponent});
  return fs;
}

}  // namespace

std::vector<cplx> position_profile(const TestFunction& f, const std::vector<Eigen::VectorXd>& points,
                                   const ProfileSpec& spec) {
  const int dim = f.dim();
  for (const auto& x : points)
    if (x.size() != dim) throw StructuralError("position_profile: point dimension mismatch");
  std::vector<cplx> out(points.size(), 0.0);
  if (points.empty()) return out;

  // Distinct coordinates per axis.
  std::vector<std::vector<double>> coords(static_cast<std::size_t>(dim));
  std::vector<std::vector<int>> index(points.size(), std::vector<int>(static_cast<std::size_t>(dim)));
  std::vector<double> xmax(static_cast<std::size_t>(dim), 0.0);
  for (int a = 0; a < dim; ++a) {
    std::map<double, int> seen;
    for (std::size_t p = 0; p < points.size(); ++p) {
      const double x = points[p][a];
      auto [it, inserted] = seen.emplace(x, static_cast<int>(coords[static_cast<std::size_t>(a)].size()));
      if (inserted) coords[static_cast<std::size_t>(a)].push_back(x);
      index[p][static_cast<std::size_t>(a)] = it->second;
      xmax[static_cast<std::size_t>(a)] = std::max(xmax[static_cast<std::size_t>(a)], std::abs(x));
    }
  }

  for (const Term& t : f.terms()) {
    if (separable(f, t)) {
      std::vector<std::vector<cplx>> per_axis(static_cast<std::size_t>(dim));
      for (int a = 0; a < dim; ++a) {
        const std::vector<Factor> fs = axis_factors(f, t, a);
        const AxisRule rule = axis_rule(f, fs, a, xmax[static_cast<std::size_t>(a)], spec);
        std::vector<cplx> g(static_cast<std::size_t>(rule.count));
        for (int j = 0; j < rule.count; ++j) {
          const double k = rule.k0 + j * rule.dk;
          cplx v = 1.0;
          for (const Factor& fac : fs) v *= fac.value(k);
          g[static_cast<std::size_t>(j)] = v;
        }
        per_axis[static_cast<std::size_t>(a)] =
            inverse_sums(g, rule, inverse_sign(f.spatial(), a), coords[static_cast<std::size_t>(a)]);
      }
      for (std::size_t p = 0; p < points.size(); ++p) {
        cplx v = t.coeff;
        for (int a = 0; a < dim; ++a) v *= per_axis[static_cast<std::size_t>(a)][static_cast<std::size_t>(index[p][static_cast<std::size_t>(a)])];
        out[p] += v;
      }
      continue;
    }

    // Joint branch over several spatial axes: direct tensor sum over those axes.
    const int first = f.spatial() ? 0 : 1;
    std::vector<AxisRule> rules(static_cast<std::size_t>(dim));
    for (int a = 0; a < dim; ++a) {
      rules[static_cast<std::size_t>(a)] =
          axis_rule(f, t.axes[static_cast<std::size_t>(a)], a, xmax[static_cast<std::size_t>(a)], spec,
                    a >= first ? 40.0 / t.joint->mass : 0.0);
      if (a >= first && rules[static_cast<std::size_t>(a)].count > spec.max_joint_nodes)
        throw CapacityError("position_profile: non-separable term needs more than max_joint_nodes per axis");
    }
    std::vector<std::vector<cplx>> head(static_cast<std::size_t>(first));
    for (int a = 0; a < first; ++a) {
      const AxisRule& rule = rules[static_cast<std::size_t>(a)];
      std::vector<cplx> g(static_cast<std::size_t>(rule.count));
      for (int j = 0; j < rule.count; ++j) {
        cplx v = 1.0;
        for (const Factor& fac : t.axes[static_cast<std::size_t>(a)]) v *= fac.value(rule.k0 + j * rule.dk);
        g[static_cast<std::size_t>(j)] = v;
      }
      head[static_cast<std::size_t>(a)] = inverse_sums(g, rule, inverse_sign(f.spatial(), a), coords[static_cast<std::size_t>(a)]);
    }
    const int nsp = dim - first;
    long total = 1;
    for (int a = first; a < dim; ++a) total *= rules[static_cast<std::size_t>(a)].count;
    std::vector<double> k(static_cast<std::size_t>(nsp));
    for (long idx = 0; idx < total; ++idx) {
      long rest = idx;
      double w = 1.0;
      cplx v = t.coeff;
      for (int a = first; a < dim; ++a) {
        const AxisRule& rule = rules[static_cast<std::size_t>(a)];
        const int j = static_cast<int>(rest % rule.count);
        rest /= rule.count;
        const double ka = rule.k0 + j * rule.dk;
        k[static_cast<std::size_t>(a - first)] = ka;
        w *= rule.dk * kInvSqrt2Pi;
        for (const Factor& fac : t.axes[static_cast<std::size_t>(a)]) v *= fac.value(ka);
      }
      if (v == 0.0) continue;
      v *= t.joint->value(k) * w;
      for (std::size_t p = 0; p < points.size(); ++p) {
        double phase = 0.0;
        for (int a = first; a < dim; ++a) phase += k[static_cast<std::size_t>(a - first)] * points[p][a];
        cplx term = v * std::polar(1.0, phase);
        for (int a = 0; a < first; ++a) term *= head[static_cast<std::size_t>(a)][static_cast<std::size_t>(index[p][static_cast<std::size_t>(a)])];
        out[p] += term;
      }
    }
  }
  return out;
}

std::vector<Eigen::VectorXd> tensor_points(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int count) {
  if (count < 2 || lo.size() != hi.size()) throw ConfigurationError("tensor_points: bad sampling request");
  const int dim = static_cast<int>(lo.size());
  long total = 1;
  for (int a = 0; a < dim; ++a) total *= count;
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(total));
  for (long idx = 0; idx < total; ++idx) {
    Eigen::VectorXd x(dim);
    long rest = idx;
    for (int a = 0; a < dim; ++a) {
      const int j = static_cast<int>(rest % count);
      rest /= count;
      x[a] = lo[a] + (hi[a] - lo[a]) * j / (count - 1);
    }
    out.push_back(std::move(x));
  }
  return out;
}

SupportCheck support_check(const TestFunction& f, const std::vector<Eigen::VectorXd>& samples, const Region& region,
                           const ProfileSpec& spec) {
  const std::vector<cplx> values = position_profile(f, samples, spec);
  SupportCheck out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double v = std::abs(values[i]);
    out.peak = std::max(out.peak, v);
    if (!region.contains(samples[i])) {
      ++out.outside_count;
      if (v >= out.outside_max) {
        out.outside_max = v;
        out.worst = samples[i];
      }
    }
  }
  out.ratio = out.peak > 0.0 ? out.outside_max / out.peak : 0.0;
  return out;
}

}  // namespace nlf
