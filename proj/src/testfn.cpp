#include "nlf/testfn.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nlf/errors.hpp"

namespace nlf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd json_vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Sign of the phase e^{i sigma k x} in the forward transform along an axis.
double axis_sign(bool spatial, int axis) { return (spatial || axis > 0) ? -1.0 : 1.0; }

void require_dim(const TestFunction& f, const Eigen::VectorXd& v, const char* what) {
  if (v.size() != f.dim()) {
    std::ostringstream os;
    os << what << ": vector of size " << v.size() << " for a function of dimension " << f.dim();
    throw StructuralError(os.str());
  }
}

// Applies a per-factor map to every factor of every term.
template <class F>
std::vector<Term> map_factors(const TestFunction& f, F&& fn) {
  std::vector<Term> terms = f.terms();
  for (Term& t : terms)
    for (auto& axis : t.axes)
      for (Factor& fac : axis) fn(fac);
  return terms;
}

}  // namespace

// ---------------------------------------------------------------- Region

Region Region::right_wedge(Eigen::VectorXd apex) {
  Region r;
  r.kind = Kind::RightWedge;
  r.point = std::move(apex);
  return r;
}

Region Region::left_wedge(Eigen::VectorXd apex) {
  Region r;
  r.kind = Kind::LeftWedge;
  r.point = std::move(apex);
  return r;
}

Region Region::ball(Eigen::VectorXd center, double radius) {
  if (!(radius > 0.0)) throw ConfigurationError("Region::ball: radius must be positive");
  Region r;
  r.kind = Kind::Ball;
  r.point = std::move(center);
  r.radius = radius;
  return r;
}

Region Region::slab(double lo, double hi) {
  if (!(hi > lo)) throw ConfigurationError("Region::slab: empty interval");
  Region r;
  r.kind = Kind::Slab;
  r.lo = lo;
  r.hi = hi;
  return r;
}

Region Region::all() { return Region{}; }

bool Region::contains(const Eigen::VectorXd& x) const {
  switch (kind) {
    case Kind::RightWedge:
      return x[1] - point[1] > std::abs(x[0] - point[0]);
    case Kind::LeftWedge:
      return point[1] - x[1] > std::abs(x[0] - point[0]);
    case Kind::Ball:
      return (x - point).norm() < radius;
    case Kind::Slab:
      return x[0] > lo && x[0] < hi;
    case Kind::All:
      return true;
  }
  return true;
}

Region Region::shifted(const Eigen::VectorXd& a) const {
  Region r = *this;
  switch (kind) {
    case Kind::RightWedge:
    case Kind::LeftWedge:
    case Kind::Ball:
      r.point = point + a;
      break;
    case Kind::Slab:
      r.lo = lo + a[0];
      r.hi = hi + a[0];
      break;
    case Kind::All:
      break;
  }
  return r;
}

Region Region::reflected() const {
  Region r = *this;
  switch (kind) {
    case Kind::RightWedge:
      r.kind = Kind::LeftWedge;
      r.point = -point;
      break;
    case Kind::LeftWedge:
      r.kind = Kind::RightWedge;
      r.point = -point;
      break;
    case Kind::Ball:
      r.point = -point;
      break;
    case Kind::Slab:
      r.lo = -hi;
      r.hi = -lo;
      break;
    case Kind::All:
      break;
  }
  return r;
}

json Region::to_json() const {
  switch (kind) {
    case Kind::RightWedge:
      return {{"kind", "right_wedge"}, {"apex", vec_json(point)}};
    case Kind::LeftWedge:
      return {{"kind", "left_wedge"}, {"apex", vec_json(point)}};
    case Kind::Ball:
      return {{"kind", "ball"}, {"center", vec_json(point)}, {"radius", radius}};
    case Kind::Slab:
      return {{"kind", "slab"},
              {"lo", std::isfinite(lo) ? json(lo) : json("-inf")},
              {"hi", std::isfinite(hi) ? json(hi) : json("inf")}};
    case Kind::All:
      return {{"kind", "all"}};
  }
  return {};
}

bool region_within(const Region& inner, const Region& outer) {
  using K = Region::Kind;
  if (outer.kind == K::All) return true;
  if (inner.kind == K::All) return false;
  if (inner.kind == K::Ball) {
    const Eigen::VectorXd& c = inner.point;
    switch (outer.kind) {
      case K::RightWedge:
        return (c[1] - outer.point[1] - std::abs(c[0] - outer.point[0])) / std::numbers::sqrt2 >= inner.radius;
      case K::LeftWedge:
        return (outer.point[1] - c[1] - std::abs(c[0] - outer.point[0])) / std::numbers::sqrt2 >= inner.radius;
      case K::Ball:
        return (c - outer.point).norm() + inner.radius <= outer.radius;
      case K::Slab:
        return c[0] - inner.radius >= outer.lo && c[0] + inner.radius <= outer.hi;
      default:
        return false;
    }
  }
  if (inner.kind == K::RightWedge && outer.kind == K::RightWedge)
    return inner.point[1] - outer.point[1] >= std::abs(inner.point[0] - outer.point[0]);
  if (inner.kind == K::LeftWedge && outer.kind == K::LeftWedge)
    return outer.point[1] - inner.point[1] >= std::abs(inner.point[0] - outer.point[0]);
  if (inner.kind == K::Slab && outer.kind == K::Slab) return inner.lo >= outer.lo && inner.hi <= outer.hi;
  return false;
}

bool spacelike_separated(const Region& r1, const Region& r2) {
  using K = Region::Kind;
  if (r1.kind == K::Ball && r2.kind == K::Ball) {
    const Eigen::VectorXd delta = r2.point - r1.point;
    const double spatial = delta.tail(delta.size() - 1).norm();
    return spatial - std::abs(delta[0]) > std::numbers::sqrt2 * (r1.radius + r2.radius);
  }
  if (r1.kind == K::RightWedge && r2.kind == K::Ball) return region_within(r2, Region::left_wedge(r1.point));
  if (r1.kind == K::LeftWedge && r2.kind == K::Ball) return region_within(r2, Region::right_wedge(r1.point));
  if (r2.kind == K::RightWedge || r2.kind == K::LeftWedge) {
    if (r1.kind == K::Ball) return spacelike_separated(r2, r1);
  }
  if (r1.kind == K::RightWedge && r2.kind == K::LeftWedge)
    return r1.point[1] - r2.point[1] >= std::abs(r1.point[0] - r2.point[0]);
  if (r1.kind == K::LeftWedge && r2.kind == K::RightWedge) return spacelike_separated(r2, r1);
  return false;
}

// ---------------------------------------------------------------- factors

cplx Factor::value(double k) const {
  const double u = scale * k + shift;
  switch (kind) {
    case Kind::Mollifier:
      return mollifier_transform(u);
    case Kind::Exp:
      return std::polar(1.0, u);
    case Kind::Power: {
      double v = 1.0;
      for (int i = 0; i < power; ++i) v *= u;
      return v;
    }
    case Kind::SineIntegral:
      return sine_integral(u);
    case Kind::Branch: {
      const cplx r = std::sqrt(cplx(u, b));
      return exponent > 0 ? r : 1.0 / r;
    }
  }
  return 0.0;
}

cplx JointBranch::value(std::span<const double> spatial) const {
  double perp2 = 0.0;
  for (std::size_t i = 1; i < spatial.size(); ++i) perp2 += spatial[i] * spatial[i];
  const cplx r = std::sqrt(cplx(s * spatial[0], t * std::sqrt(perp2 + mass * mass)));
  return exponent > 0 ? r : 1.0 / r;
}

// ---------------------------------------------------------------- TestFunction

TestFunction::TestFunction(int dim, bool spatial, std::vector<Term> terms, Region support, bool is_real,
                           std::string label, json descriptor)
    : dim_(dim),
      spatial_(spatial),
      terms_(std::move(terms)),
      support_(std::move(support)),
      is_real_(is_real),
      label_(std::move(label)),
      descriptor_(std::move(descriptor)) {
  for (Term& t : terms_) t.axes.resize(static_cast<std::size_t>(dim_));
}

cplx TestFunction::evaluate(std::span<const double> p) const {
  if (static_cast<int>(p.size()) != dim_) throw StructuralError("TestFunction::evaluate: momentum dimension mismatch");
  cplx sum = 0.0;
  for (const Term& t : terms_) {
    cplx v = t.coeff;
    for (int a = 0; a < dim_ && v != 0.0; ++a)
      for (const Factor& f : t.axes[static_cast<std::size_t>(a)]) v *= f.value(p[static_cast<std::size_t>(a)]);
    if (t.joint && v != 0.0) v *= t.joint->value(p.subspan(static_cast<std::size_t>(spatial_ ? 0 : 1)));
    sum += v;
  }
  return sum;
}

TestFunction TestFunction::with_label(std::string label) const {
  TestFunction f = *this;
  f.label_ = std::move(label);
  return f;
}

TestFunction TestFunction::with_support(Region support) const {
  TestFunction f = *this;
  f.support_ = std::move(support);
  return f;
}

// ---------------------------------------------------------------- factories

TestFunction bump(int dim, const Eigen::VectorXd& center, double radius, bool spatial) {
  if (dim < 1) throw ConfigurationError("bump: dimension must be positive");
  if (center.size() != dim) throw ConfigurationError("bump: center dimension mismatch");
  if (!(radius > 0.0)) throw ConfigurationError("bump: radius must be positive");
  // The product support [c - rho, c + rho]^dim sits inside the ball.
  const double rho = radius / std::sqrt(static_cast<double>(dim));
  Term t;
  t.coeff = std::pow(rho, dim);
  t.axes.resize(static_cast<std::size_t>(dim));
  for (int a = 0; a < dim; ++a) {
    auto& axis = t.axes[static_cast<std::size_t>(a)];
    axis.push_back({.kind = Factor::Kind::Mollifier, .scale = rho});
    if (center[a] != 0.0) axis.push_back({.kind = Factor::Kind::Exp, .scale = axis_sign(spatial, a) * center[a]});
  }
  json desc = {{"family", "bump"}, {"dim", dim}, {"center", vec_json(center)}, {"radius", radius}, {"spatial", spatial}};
  return TestFunction(dim, spatial, {t}, Region::ball(center, radius), true, "bump", desc);
}

TestFunction seed_bump(int dim, const Eigen::VectorXd& center, double radius, bool spatial) {
  const TestFunction base = bump(dim, center, radius, spatial);
  const int first = spatial ? 0 : 1;
  if (dim - first < 1) throw ConfigurationError("seed_bump: no spatial axis");
  std::vector<Term> terms;
  for (int a = first; a < dim; ++a) {
    Term t = base.terms().front();
    t.coeff = -t.coeff;
    t.axes[static_cast<std::size_t>(a)].push_back({.kind = Factor::Kind::Power, .power = 2});
    terms.push_back(std::move(t));
  }
  json desc = {{"family", "seed_bump"}, {"dim", dim}, {"center", vec_json(center)}, {"radius", radius},
               {"spatial", spatial}};
  return TestFunction(dim, spatial, std::move(terms), base.support(), true, "seed_bump", desc);
}

TestFunction modulate(const TestFunction& f, const Eigen::VectorXd& q) {
  require_dim(f, q, "modulate");
  for (const Term& t : f.terms())
    if (t.joint) throw PreconditionError("modulate: not available for joint branch factors");
  std::vector<Term> terms = f.terms();
  for (Term& t : terms)
    for (int a = 0; a < f.dim(); ++a)
      for (Factor& fac : t.axes[static_cast<std::size_t>(a)]) fac.shift += fac.scale * q[a];
  json desc = {{"family", "modulate"}, {"q", vec_json(q)}, {"of", f.descriptor()}};
  return TestFunction(f.dim(), f.spatial(), std::move(terms), f.support(), q.isZero(0.0) && f.is_real(),
                      f.label() + "*wave", desc);
}

TestFunction dilate_momentum(const TestFunction& f, double lambda) {
  if (!(lambda > 0.0)) throw ConfigurationError("dilate_momentum: factor must be positive");
  for (const Term& t : f.terms())
    if (t.joint) throw PreconditionError("dilate_momentum: not available for joint branch factors");
  std::vector<Term> terms = map_factors(f, [&](Factor& fac) { fac.scale *= lambda; });
  Region support = f.support();
  if (support.kind == Region::Kind::Ball) support = Region::ball(support.point / lambda, support.radius / lambda);
  else if (support.kind != Region::Kind::All) support = Region::all();
  json desc = {{"family", "dilate"}, {"lambda", lambda}, {"of", f.descriptor()}};
  return TestFunction(f.dim(), f.spatial(), std::move(terms), support, f.is_real(), f.label(), desc);
}

TestFunction translate(const TestFunction& f, const Eigen::VectorXd& a) {
  require_dim(f, a, "translate");
  std::vector<Term> terms = f.terms();
  for (Term& t : terms)
    for (int i = 0; i < f.dim(); ++i)
      if (a[i] != 0.0)
        t.axes[static_cast<std::size_t>(i)].push_back({.kind = Factor::Kind::Exp, .scale = axis_sign(f.spatial(), i) * a[i]});
  json desc = {{"family", "translate"}, {"a", vec_json(a)}, {"of", f.descriptor()}};
  return TestFunction(f.dim(), f.spatial(), std::move(terms), f.support().shifted(a), f.is_real(), f.label(), desc);
}

TestFunction conjugate(const TestFunction& f) {
  if (f.is_real()) return f;
  std::vector<Term> terms = f.terms();
  for (Term& t : terms) {
    t.coeff = std::conj(t.coeff);
    for (auto& axis : t.axes)
      for (Factor& fac : axis) {
        switch (fac.kind) {
          case Factor::Kind::Exp:
            fac.shift = -fac.shift;
            break;
          case Factor::Kind::Branch:
            fac.scale = -fac.scale;
            fac.b = -fac.b;
            break;
          default:
            fac.scale = -fac.scale;
            break;
        }
      }
    if (t.joint) {
      t.joint->s = -t.joint->s;
      t.joint->t = -t.joint->t;
    }
  }
  json desc = {{"family", "conjugate"}, {"of", f.descriptor()}};
  return TestFunction(f.dim(), f.spatial(), std::move(terms), f.support(), false, "conj(" + f.label() + ")", desc);
}

TestFunction reflect(const TestFunction& f) {
  std::vector<Term> terms = map_factors(f, [](Factor& fac) { fac.scale = -fac.scale; });
  for (Term& t : terms)
    if (t.joint) t.joint->s = -t.joint->s;
  json desc = {{"family", "reflect"}, {"of", f.descriptor()}};
  return TestFunction(f.dim(), f.spatial(), std::move(terms), f.support().reflected(), f.is_real(),
                      "reflect(" + f.label() + ")", desc);
}

TestFunction klein_gordon_image(const TestFunction& f, double m) {
  if (f.spatial()) throw PreconditionError("klein_gordon_image: spacetime function required");
  std::vector<Term> terms;
  for (const Term& base : f.terms()) {
    Term t0 = base;
    t0.coeff *= m * m;
    terms.push_back(t0);
    for (int a = 0; a < f.dim(); ++a) {
      Term t = base;
      if (a == 0) t.coeff = -t.coeff;
      t.axes[static_cast<std::size_t>(a)].push_back({.kind = Factor::Kind::Power, .power = 2});
      terms.push_back(std::move(t));
    }
  }
  json desc = {{"family", "klein_gordon"}, {"m", m}, {"of", f.descriptor()}};
  return TestFunction(f.dim(), false, std::move(terms), f.support(), f.is_real(), "kg(" + f.label() + ")", desc);
}

TestFunction scaled(cplx c, const TestFunction& f) { return linear_combination({{c, f}}); }

TestFunction linear_combination(const std::vector<std::pair<cplx, TestFunction>>& parts) {
  if (parts.empty()) throw ConfigurationError("linear_combination: no parts");
  const TestFunction& first = parts.front().second;
  std::vector<Term> terms;
  bool real = true;
  bool same_support = true;
  bool balls = true;
  json pj = json::array();
  std::string label;
  for (const auto& [c, f] : parts) {
    if (f.dim() != first.dim() || f.spatial() != first.spatial())
      throw StructuralError("linear_combination: dimension mismatch");
    real = real && f.is_real() && c.imag() == 0.0;
    same_support = same_support && f.support().to_json() == first.support().to_json();
    balls = balls && f.support().kind == Region::Kind::Ball;
    for (Term t : f.terms()) {
      t.coeff *= c;
      terms.push_back(std::move(t));
    }
    pj.push_back({{"re", c.real()}, {"im", c.imag()}, {"of", f.descriptor()}});
    label += (label.empty() ? "" : "+") + f.label();
  }
  Region support = Region::all();
  if (same_support) {
    support = first.support();
  } else if (balls) {
    // Bounding ball around the first center.
    double r = 0.0;
    for (const auto& part : parts)
      r = std::max(r, (part.second.support().point - first.support().point).norm() + part.second.support().radius);
    support = Region::ball(first.support().point, r);
  }
  json desc = {{"family", "combination"}, {"parts", pj}};
  return TestFunction(first.dim(), first.spatial(), std::move(terms), support, real, label, desc);
}

TestFunction point_source(const Eigen::VectorXd& x) {
  const int d = static_cast<int>(x.size());
  Term t;
  t.coeff = std::pow(2.0 * std::numbers::pi, -0.5 * d);
  t.axes.resize(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a)
    if (x[a] != 0.0) t.axes[static_cast<std::size_t>(a)].push_back({.kind = Factor::Kind::Exp, .scale = axis_sign(false, a) * x[a]});
  json desc = {{"family", "point"}, {"x", vec_json(x)}};
  return TestFunction(d, false, {t}, Region::ball(x, 1e-9), true, "delta", desc);
}

// ---------------------------------------------------------------- central sequences

namespace {

// h_{1,n} (which = 1) or h_{2,n} (which = 2) before normalization.
TestFunction central_sequence_raw(int n, const TestFunction& h, int which) {
  const int d = h.dim();
  const double nn = static_cast<double>(n);
  const double amp = std::pow(nn, -(d - 2));
  std::vector<Term> terms = dilate_momentum(h, 1.0 / (nn * nn)).terms();
  for (Term& t : terms) {
    t.coeff *= amp;
    if (which == 1) {
      t.coeff *= cplx(0.0, 1.0);
      t.axes[0].push_back({.kind = Factor::Kind::SineIntegral, .scale = 1.0 / (2.0 * nn)});
    }
  }
  Eigen::VectorXd origin = Eigen::VectorXd::Zero(d);
  json desc = {{"family", "central_sequence"}, {"n", n}, {"which", which}, {"seed", h.descriptor()}, {"norm", 1.0}};
  return TestFunction(d, false, std::move(terms), Region::ball(origin, 1.0 / nn), true,
                      "h" + std::to_string(which) + "," + std::to_string(n), desc);
}

TestFunction normalized(const TestFunction& raw, double norm) {
  TestFunction f = scaled(1.0 / norm, raw);
  json desc = raw.descriptor();
  desc["norm"] = norm;
  return TestFunction(f.dim(), false, f.terms(), raw.support(), true,
                      "f" + std::to_string(desc["which"].get<int>()) + "," + std::to_string(desc["n"].get<int>()), desc);
}

}  // namespace

CentralSequencePair central_sequence_pair(int n, const TestFunction& h, const GridPtr& grid) {
  if (n < 1) throw ConfigurationError("central_sequence_pair: n must be positive");
  const json& desc = h.descriptor();
  if (!desc.is_object() || desc.value("family", "") != "seed_bump" || desc.value("spatial", true))
    throw PreconditionError("central_sequence_pair: seed must be a spacetime seed_bump");
  if (desc["radius"].get<double>() > 0.5 + 1e-12) throw PreconditionError("central_sequence_pair: seed radius exceeds 1/2");
  if (h.dim() != grid->config().d) throw StructuralError("central_sequence_pair: seed dimension differs from the grid");

  CentralSequencePair pair;
  pair.n = n;
  const TestFunction h1 = central_sequence_raw(n, h, 1);
  const TestFunction h2 = central_sequence_raw(n, h, 2);
  pair.norm1 = restrict_to_shell(h1, grid).norm();
  pair.norm2 = restrict_to_shell(h2, grid).norm();
  if (!(pair.norm1 > 0.0) || !(pair.norm2 > 0.0)) throw DegenerateInputError("central_sequence_pair: vanishing mass-shell norm");
  pair.f1 = normalized(h1, pair.norm1);
  pair.f2 = normalized(h2, pair.norm2);
  return pair;
}

cplx coherence_scalar(const CentralSequencePair& pair, const Eigen::VectorXd& a, const GridPtr& grid) {
  const cplx i(0.0, 1.0);
  const OneParticleVector v1 = restrict_to_shell(pair.f1, grid);
  const OneParticleVector v2 = restrict_to_shell(pair.f2, grid);
  const OneParticleVector t1 = restrict_to_shell(translate(pair.f1, a), grid);
  const OneParticleVector t2 = restrict_to_shell(translate(pair.f2, a), grid);
  return inner_product(v1 + i * v2, t1 - i * t2);
}

std::vector<Eigen::VectorXd> default_translation_lattice(int d) {
  std::vector<Eigen::VectorXd> out;
  for (double a1 : {3.0, 3.5, 4.0, 5.0, 6.0})
    for (double a0 : {0.0, 0.25, -0.25, 0.5, -0.5}) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(d);
      a[0] = a0;
      a[1] = a1;
      out.push_back(a);
    }
  return out;
}

std::optional<CoherentTranslation> select_coherent_translation(const std::vector<CentralSequencePair>& pairs,
                                                               const std::vector<Eigen::VectorXd>& lattice,
                                                               double threshold, const GridPtr& grid) {
  for (const Eigen::VectorXd& a : lattice) {
    bool ok = true;
    CoherentTranslation out{a, {}};
    for (const CentralSequencePair& p : pairs) {
      if (!spacelike_separated(p.f1.support(), p.f1.support().shifted(a))) {
        ok = false;
        break;
      }
      const cplx s = coherence_scalar(p, a, grid);
      out.scalars.push_back(s);
      if (!(std::abs(s) > threshold)) {
        ok = false;
        break;
      }
    }
    if (ok) return out;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- string functions

double string_constant() { return 1.0 / std::sqrt(2.0 * std::numbers::pi); }

TestFunction default_string_seed(int spatial_dim, double a) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(spatial_dim);
  c[0] = 0.5 * a;
  return bump(spatial_dim, c, 0.4 * a, true).with_label("l");
}

StringField string_function(double a, const TestFunction& l, StringSide side, const ModelConfig& config) {
  config.validate();
  if (!(a > 0.0)) throw ConfigurationError("string_function: slab width must be positive");
  if (!l.spatial() || l.dim() != config.d - 1) throw PreconditionError("string_function: l must be a spatial function");
  if (!region_within(l.support(), Region::slab(0.0, a)))
    throw PreconditionError("string_function: support of l leaves the slab 0 < x_1 < a");
  for (const Term& t : l.terms())
    if (t.joint) throw PreconditionError("string_function: l already carries a branch factor");

  const bool lower = side == StringSide::LowerVanishing;
  std::vector<Term> kterms = l.terms();
  for (Term& t : kterms) {
    if (config.d == 2) {
      // sqrt(p1 - i m) vanishes below, 1/sqrt(p1 + i m) vanishes above.
      t.axes[0].push_back({.kind = Factor::Kind::Branch, .b = lower ? -config.m : config.m, .exponent = lower ? 1 : -1});
    } else {
      t.joint = JointBranch{.s = 1.0, .t = lower ? -1.0 : 1.0, .mass = config.m, .exponent = lower ? 1 : -1};
    }
  }
  const Region ksupport = lower ? Region::slab(0.0, kInf) : Region::slab(-kInf, a);
  json base = {{"a", a}, {"side", lower ? "lower" : "upper"}, {"l", l.descriptor()}, {"m", config.m}, {"d", config.d}};
  json kdesc = base;
  kdesc["family"] = "string_k";
  TestFunction k(config.d - 1, true, kterms, ksupport, false, lower ? "k" : "k_dual", kdesc);

  const double c = string_constant();
  std::vector<Term> hterms;
  for (const Term& t : kterms) {
    Term h;
    h.coeff = c * t.coeff;
    h.axes.resize(static_cast<std::size_t>(config.d));
    for (int i = 0; i < config.d - 1; ++i) h.axes[static_cast<std::size_t>(i + 1)] = t.axes[static_cast<std::size_t>(i)];
    h.joint = t.joint;
    hterms.push_back(std::move(h));
  }
  Eigen::VectorXd apex = Eigen::VectorXd::Zero(config.d);
  Region hsupport = Region::right_wedge(apex);
  if (!lower) {
    apex[1] = a;
    hsupport = Region::left_wedge(apex);
  }
  json hdesc = base;
  hdesc["family"] = "string_h";
  TestFunction h(config.d, false, std::move(hterms), hsupport, false, lower ? "h" : "h_dual", hdesc);
  return StringField{h, k, l, a, side, c};
}

StringField shift_string(const StringField& s, double dx) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(s.h.dim());
  x[1] = dx;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(s.k.dim());
  y[0] = dx;
  StringField out = s;
  out.h = translate(s.h, x).with_label(s.h.label());
  out.k = translate(s.k, y).with_label(s.k.label());
  out.l = translate(s.l, y).with_label(s.l.label());
  out.origin = s.origin + dx;
  return out;
}

// ---------------------------------------------------------------- serialization

json to_json(const TestFunction& f) { return f.descriptor(); }

TestFunction test_function_from_json(const json& j, const ModelConfig& config) {
  if (!j.is_object() || !j.contains("family")) throw ConfigurationError("test function descriptor: missing family");
  const std::string family = j["family"].get<std::string>();
  auto of = [&](const char* key) { return test_function_from_json(j.at(key), config); };
  try {
    if (family == "bump" || family == "seed_bump") {
      const Eigen::VectorXd c = json_vec(j.at("center"));
      const int dim = j.value("dim", static_cast<int>(c.size()));
      const bool spatial = j.value("spatial", false);
      const double r = j.at("radius").get<double>();
      return family == "bump" ? bump(dim, c, r, spatial) : seed_bump(dim, c, r, spatial);
    }
    if (family == "translate") return translate(of("of"), json_vec(j.at("a")));
    if (family == "modulate") return modulate(of("of"), json_vec(j.at("q")));
    if (family == "dilate") return dilate_momentum(of("of"), j.at("lambda").get<double>());
    if (family == "conjugate") return conjugate(of("of"));
    if (family == "reflect") return reflect(of("of"));
    if (family == "klein_gordon") return klein_gordon_image(of("of"), j.value("m", config.m));
    if (family == "point") return point_source(json_vec(j.at("x")));
    if (family == "combination") {
      std::vector<std::pair<cplx, TestFunction>> parts;
      for (const json& p : j.at("parts"))
        parts.emplace_back(cplx(p.value("re", 0.0), p.value("im", 0.0)), test_function_from_json(p.at("of"), config));
      return linear_combination(parts);
    }
    if (family == "central_sequence") {
      const TestFunction seed = of("seed");
      const TestFunction raw = central_sequence_raw(j.at("n").get<int>(), seed, j.at("which").get<int>());
      return normalized(raw, j.value("norm", 1.0));
    }
    if (family == "string_h" || family == "string_k") {
      ModelConfig mc{j.value("d", config.d), j.value("m", config.m)};
      const StringSide side = j.value("side", "lower") == "lower" ? StringSide::LowerVanishing : StringSide::UpperVanishing;
      const StringField s = string_function(j.at("a").get<double>(), of("l"), side, mc);
      return family == "string_h" ? s.h : s.k;
    }
  } catch (const json::exception& e) {
    throw ConfigurationError("test function descriptor '" + family + "': " + e.what());
  }
  throw ConfigurationError("test function descriptor: unknown family '" + family + "'");
}

}  // namespace nlf
