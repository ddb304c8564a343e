#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "nlf/testfn.hpp"

// One-particle boosts and their imaginary continuation on the d = 2 shell,
// p(theta) = (m cosh theta, m sinh theta).
namespace nlf {

struct RapiditySpec {
  double span = 8.0;  // nodes cover (-span, span)
  int count = 1024;   // midpoint nodes theta_j = -span + (j + 1/2) 2 span / count
  double end_decay = 1e-8;
};

struct RapidityProfile {
  std::vector<double> theta;
  std::vector<cplx> values;
  double mass = 1.0;
  std::string label;
  std::optional<TestFunction> source;
  Region support = Region::all();
  json metadata = json::object();

  double spacing() const { return theta.size() > 1 ? theta[1] - theta[0] : 0.0; }
  // sqrt(pi h sum |f_j|^2), the mass-shell norm in rapidity coordinates.
  double norm() const;
};

// Samples f~ on the shell; SpanError when the ends are not below end_decay times the peak.
RapidityProfile rapidity_profile(const TestFunction& f, const RapiditySpec& spec, double m = 1.0);

// f(theta) -> f(theta - t) by a unit-modulus Fourier multiplier.
RapidityProfile boost_flow(const RapidityProfile& profile, double t);

struct ContinuationSpec {
  double window = 4.0;        // |lambda| <= window is kept
  int sign = 1;               // multiplier e^{sign s lambda}; fixed by calibrate_continuation_sign
  int padding = 1;            // zero-padding factor before the transform
  double growth_limit = 10.0;  // norm growth above this signals a domain violation
};

// f(theta) -> f(theta - i s) restricted to the spectral window. No domain checks.
RapidityProfile imaginary_boost(const RapidityProfile& profile, double s, const ContinuationSpec& spec);
// The same band restriction without continuation.
RapidityProfile band_limit(const RapidityProfile& profile, const ContinuationSpec& spec);

// Continuation by i pi. PreconditionError unless the source support lies in W_R;
// DomainViolation when the norm grows beyond growth_limit.
RapidityProfile half_continuation(const RapidityProfile& profile, const ContinuationSpec& spec);

// x -> -x in d = 2, the reflection about the edge of W_R.
TestFunction theta_reflection(const TestFunction& f);
// Profile of the reflected source; requires the source function.
RapidityProfile theta_reflection(const RapidityProfile& profile);
// One-particle modular conjugation V U(theta_R): pointwise complex conjugation of the profile.
RapidityProfile modular_conjugation(const RapidityProfile& profile);

struct TomitaResult {
  double residual = 0.0;       // |J Delta^{1/2} f - W fbar| / |f|
  double band_fraction = 0.0;  // |W fbar| / |fbar|
  double growth = 0.0;         // |Delta^{1/2} f| / |f| inside the window
  json to_json() const;
};

TomitaResult tomita_S_check(const TestFunction& f, const RapiditySpec& rapidity, const ContinuationSpec& spec,
                            double m = 1.0);

// |H(H(f)) - imaginary_boost(f, 2 pi)| / |imaginary_boost(f, 2 pi)| with H the i pi continuation.
double delta_consistency(const RapidityProfile& profile, const ContinuationSpec& spec);

struct SignCalibration {
  int sign = 1;
  double growth_plus = 0.0;   // max growth over the family with multiplier e^{+pi lambda}
  double growth_minus = 0.0;  // and with e^{-pi lambda}
  bool decisive = false;      // exactly one sign keeps the family bounded by 1 + slack
  json to_json() const;
};

// Chooses the multiplier sign that is contractive on a family of W_R-supported functions.
SignCalibration calibrate_continuation_sign(const std::vector<TestFunction>& wedge_family, const RapiditySpec& rapidity,
                                            const ContinuationSpec& spec, double m = 1.0, double slack = 0.05);

// Real bumps inside W_R used as the default calibration and check family.
std::vector<TestFunction> default_wedge_family();

}  // namespace nlf
