#include "nlf/modular.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "nlf/errors.hpp"

namespace nlf {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place DFT, unnormalized. FFTW planning is not thread safe.
void dft(std::vector<cplx>& data, int direction) {
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(data.size()), ptr, ptr, direction, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
}

// Angular frequency of bin k for n samples at spacing h.
double frequency(std::size_t k, std::size_t n, double h) {
  const double kk = k < (n + 1) / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
  return 2.0 * std::numbers::pi * kk / (static_cast<double>(n) * h);
}

double l2(const std::vector<cplx>& v) {
  double s = 0.0;
  for (cplx z : v) s += std::norm(z);
  return std::sqrt(s);
}

// values -> ifft(multiplier(lambda) * fft(values)), zero-padded by the given factor.
template <class Multiplier>
std::vector<cplx> apply_multiplier(const std::vector<cplx>& values, double h, int padding, Multiplier mult) {
  const std::size_t n = values.size();
  const std::size_t np = n * static_cast<std::size_t>(padding);
  std::vector<cplx> data(np, 0.0);
  std::copy(values.begin(), values.end(), data.begin());
  dft(data, FFTW_FORWARD);
  for (std::size_t k = 0; k < np; ++k) data[k] *= mult(frequency(k, np, h));
  dft(data, FFTW_BACKWARD);
  std::vector<cplx> out(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(n));
  for (cplx& z : out) z /= static_cast<double>(np);
  return out;
}

void require_profile(const RapidityProfile& p, const char* what) {
  if (p.theta.size() < 2 || p.values.size() != p.theta.size())
    throw StructuralError(std::string(what) + ": malformed rapidity profile");
}

}  // namespace

double RapidityProfile::norm() const {
  return std::sqrt(std::numbers::pi * spacing()) * l2(values);
}

RapidityProfile rapidity_profile(const TestFunction& f, const RapiditySpec& spec, double m) {
  if (f.dim() != 2 || f.spatial()) throw ConfigurationError("rapidity_profile: a d = 2 spacetime function is required");
  if (spec.count < 2 || !(spec.span > 0.0)) throw ConfigurationError("rapidity_profile: bad rapidity grid");
  if (!(m > 0.0)) throw ConfigurationError("rapidity_profile: mass must be positive");
  RapidityProfile out;
  out.mass = m;
  out.label = f.label();
  out.source = f;
  out.support = f.support();
  const double h = 2.0 * spec.span / spec.count;
  out.theta.resize(static_cast<std::size_t>(spec.count));
  out.values.resize(static_cast<std::size_t>(spec.count));
  double peak = 0.0;
  for (int j = 0; j < spec.count; ++j) {
    const double th = -spec.span + (j + 0.5) * h;
    const double p[2] = {m * std::cosh(th), m * std::sinh(th)};
    const cplx v = f.evaluate(std::span<const double>(p, 2));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw EvaluationError("rapidity_profile: non-finite value of '" + f.label() + "' at theta = " +
                            std::to_string(th));
    out.theta[static_cast<std::size_t>(j)] = th;
    out.values[static_cast<std::size_t>(j)] = v;
    peak = std::max(peak, std::abs(v));
  }
  const double ends = std::max(std::abs(out.values.front()), std::abs(out.values.back()));
  if (ends > spec.end_decay * peak) {
    std::ostringstream os;
    os << "rapidity_profile: '" << f.label() << "' has not decayed at theta = +-" << spec.span << " (end/peak "
       << ends / peak << ")";
    throw SpanError(os.str());
  }
  out.metadata = {{"span", spec.span}, {"count", spec.count}, {"end_ratio", peak > 0.0 ? ends / peak : 0.0}};
  return out;
}

RapidityProfile boost_flow(const RapidityProfile& profile, double t) {
  require_profile(profile, "boost_flow");
  RapidityProfile out = profile;
  if (t == 0.0) return out;
  out.values = apply_multiplier(profile.values, profile.spacing(), 1,
                                [t](double lambda) { return std::polar(1.0, -lambda * t); });
  out.source.reset();
  out.support = Region::all();
  out.metadata["boost"] = profile.metadata.value("boost", 0.0) + t;
  return out;
}

RapidityProfile imaginary_boost(const RapidityProfile& profile, double s, const ContinuationSpec& spec) {
  require_profile(profile, "imaginary_boost");
  if (spec.sign != 1 && spec.sign != -1) throw ConfigurationError("imaginary_boost: sign must be +1 or -1");
  if (spec.padding < 1 || !(spec.window > 0.0)) throw ConfigurationError("imaginary_boost: bad window or padding");
  RapidityProfile out = profile;
  const double rate = spec.sign * s;
  out.values = apply_multiplier(profile.values, profile.spacing(), spec.padding, [&](double lambda) {
    return std::abs(lambda) <= spec.window ? cplx(std::exp(rate * lambda)) : cplx(0.0);
  });
  out.source.reset();
  out.support = Region::all();
  const double before = l2(profile.values);
  out.metadata["imaginary_boost"] = s;
  out.metadata["window"] = spec.window;
  out.metadata["sign"] = spec.sign;
  out.metadata["padding"] = spec.padding;
  out.metadata["growth"] = before > 0.0 ? l2(out.values) / before : 0.0;
  return out;
}

RapidityProfile band_limit(const RapidityProfile& profile, const ContinuationSpec& spec) {
  require_profile(profile, "band_limit");
  RapidityProfile out = profile;
  out.values = apply_multiplier(profile.values, profile.spacing(), spec.padding,
                                [&](double lambda) { return std::abs(lambda) <= spec.window ? 1.0 : 0.0; });
  out.metadata["window"] = spec.window;
  return out;
}

RapidityProfile half_continuation(const RapidityProfile& profile, const ContinuationSpec& spec) {
  if (!region_within(profile.support, Region::right_wedge(Eigen::VectorXd::Zero(2))))
    throw PreconditionError("half_continuation: support of '" + profile.label + "' is not inside W_R");
  RapidityProfile out = imaginary_boost(profile, std::numbers::pi, spec);
  const double growth = out.metadata["growth"].get<double>();
  if (growth > spec.growth_limit) {
    std::ostringstream os;
    os << "half_continuation: norm of '" << profile.label << "' grows by " << growth << " (limit "
       << spec.growth_limit << ")";
    throw DomainViolation(os.str(), growth);
  }
  return out;
}

TestFunction theta_reflection(const TestFunction& f) {
  if (f.dim() != 2 || f.spatial()) throw ConfigurationError("theta_reflection: a d = 2 spacetime function is required");
  const std::string label = f.label().rfind("theta_R ", 0) == 0 ? f.label().substr(8) : "theta_R " + f.label();
  return reflect(f).with_label(label);
}

RapidityProfile theta_reflection(const RapidityProfile& profile) {
  require_profile(profile, "theta_reflection");
  if (!profile.source) throw PreconditionError("theta_reflection: the profile carries no source function");
  const TestFunction g = theta_reflection(*profile.source);
  RapidityProfile out = profile;
  for (std::size_t j = 0; j < profile.theta.size(); ++j) {
    const double p[2] = {profile.mass * std::cosh(profile.theta[j]), profile.mass * std::sinh(profile.theta[j])};
    out.values[j] = g.evaluate(std::span<const double>(p, 2));
  }
  out.source = g;
  out.support = g.support();
  out.label = g.label();
  return out;
}

RapidityProfile modular_conjugation(const RapidityProfile& profile) {
  RapidityProfile out = profile;
  for (cplx& z : out.values) z = std::conj(z);
  out.source.reset();
  out.support = Region::all();
  out.label = "J " + profile.label;
  return out;
}

json TomitaResult::to_json() const {
  return {{"residual", residual}, {"band_fraction", band_fraction}, {"growth", growth}};
}

TomitaResult tomita_S_check(const TestFunction& f, const RapiditySpec& rapidity, const ContinuationSpec& spec,
                            double m) {
  const RapidityProfile prof = rapidity_profile(f, rapidity, m);
  const RapidityProfile cont = half_continuation(prof, spec);
  const RapidityProfile lhs = modular_conjugation(cont);
  const RapidityProfile target = rapidity_profile(conjugate(f), rapidity, m);
  const RapidityProfile rhs = band_limit(target, spec);
  std::vector<cplx> diff(lhs.values.size());
  for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = lhs.values[j] - rhs.values[j];
  TomitaResult r;
  const double nf = l2(prof.values);
  r.residual = nf > 0.0 ? l2(diff) / nf : l2(diff);
  const double nt = l2(target.values);
  r.band_fraction = nt > 0.0 ? l2(rhs.values) / nt : 0.0;
  r.growth = cont.metadata["growth"].get<double>();
  return r;
}

double delta_consistency(const RapidityProfile& profile, const ContinuationSpec& spec) {
  const RapidityProfile twice = imaginary_boost(imaginary_boost(profile, std::numbers::pi, spec), std::numbers::pi, spec);
  const RapidityProfile full = imaginary_boost(profile, 2.0 * std::numbers::pi, spec);
  std::vector<cplx> diff(full.values.size());
  for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = twice.values[j] - full.values[j];
  const double nf = l2(full.values);
  return nf > 0.0 ? l2(diff) / nf : l2(diff);
}

json SignCalibration::to_json() const {
  return {{"sign", sign}, {"growth_plus", growth_plus}, {"growth_minus", growth_minus}, {"decisive", decisive}};
}

SignCalibration calibrate_continuation_sign(const std::vector<TestFunction>& wedge_family, const RapiditySpec& rapidity,
                                            const ContinuationSpec& spec, double m, double slack) {
  if (wedge_family.empty()) throw ConfigurationError("calibrate_continuation_sign: empty family");
  SignCalibration c;
  for (const TestFunction& f : wedge_family) {
    if (!region_within(f.support(), Region::right_wedge(Eigen::VectorXd::Zero(2))))
      throw PreconditionError("calibrate_continuation_sign: '" + f.label() + "' is not supported in W_R");
    const RapidityProfile prof = rapidity_profile(f, rapidity, m);
    ContinuationSpec s = spec;
    s.sign = 1;
    c.growth_plus = std::max(c.growth_plus, imaginary_boost(prof, std::numbers::pi, s).metadata["growth"].get<double>());
    s.sign = -1;
    c.growth_minus = std::max(c.growth_minus, imaginary_boost(prof, std::numbers::pi, s).metadata["growth"].get<double>());
  }
  const bool plus_ok = c.growth_plus <= 1.0 + slack, minus_ok = c.growth_minus <= 1.0 + slack;
  c.decisive = plus_ok != minus_ok;
  c.sign = c.growth_plus <= c.growth_minus ? 1 : -1;
  return c;
}

std::vector<TestFunction> default_wedge_family() {
  const double centers[][2] = {{0.0, 2.0}, {0.3, 1.5}, {0.0, 1.0}, {-0.3, 1.5}, {0.4, 1.8}};
  std::vector<TestFunction> out;
  for (const auto& c : centers) {
    Eigen::VectorXd x(2);
    x << c[0], c[1];
    std::ostringstream os;
    os << "bump(" << c[0] << "," << c[1] << ")";
    out.push_back(bump(2, x, 0.5).with_label(os.str()));
  }
  return out;
}

}  // namespace nlf
