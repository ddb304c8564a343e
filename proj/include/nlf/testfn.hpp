#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlf/mass_shell.hpp"
#include "nlf/special.hpp"

namespace nlf {

using json = nlohmann::json;

struct Region {
  enum class Kind { RightWedge, LeftWedge, Ball, Slab, All };

  Kind kind = Kind::All;
  Eigen::VectorXd point;  // wedge apex or ball center
  double radius = 0.0;
  double lo = 0.0, hi = 0.0;  // slab interval in x_1, spatial coordinates

  static Region right_wedge(Eigen::VectorXd apex);
  static Region left_wedge(Eigen::VectorXd apex);
  static Region ball(Eigen::VectorXd center, double radius);
  static Region slab(double lo, double hi);
  static Region all();

  // Membership of a point given in the owner's coordinates (time first for spacetime).
  bool contains(const Eigen::VectorXd& x) const;
  Region shifted(const Eigen::VectorXd& a) const;
  Region reflected() const;
  json to_json() const;
};

// True when every point of inner lies in outer. Conservative: false when undecidable.
bool region_within(const Region& inner, const Region& outer);
// Sufficient test for spacelike separation of two spacetime regions.
bool spacelike_separated(const Region& r1, const Region& r2);

// One factor of a separable term: g(scale * k + shift) where k is one momentum component.
struct Factor {
  enum class Kind {
    Mollifier,     // B(u), the transform of exp(-1/(1-x^2))
    Exp,           // e^{iu}
    Power,         // u^power
    SineIntegral,  // Si(u)
    Branch         // (u + i b)^{exponent/2}, principal branch
  };

  Kind kind = Kind::Power;
  double scale = 1.0;
  double shift = 0.0;
  int power = 0;
  double b = 0.0;
  int exponent = 1;

  cplx value(double k) const;
};

// (s p_1 + i t sqrt(|p_perp|^2 + m^2))^{exponent/2} on the spatial momentum; d >= 3 only.
struct JointBranch {
  double s = 1.0;
  double t = 1.0;
  double mass = 1.0;
  int exponent = 1;

  cplx value(std::span<const double> spatial) const;
};

struct Term {
  cplx coeff{1.0, 0.0};
  std::vector<std::vector<Factor>> axes;
  std::optional<JointBranch> joint;  // acts on axes 1.. of a spacetime function or 0.. of a spatial one
};

class TestFunction {
 public:
  TestFunction() = default;
  TestFunction(int dim, bool spatial, std::vector<Term> terms, Region support, bool is_real, std::string label,
               json descriptor);

  int dim() const { return dim_; }
  // Spatial functions live on R^{d-1}; otherwise the first coordinate is time.
  bool spatial() const { return spatial_; }
  const std::vector<Term>& terms() const { return terms_; }
  const Region& support() const { return support_; }
  bool is_real() const { return is_real_; }
  const std::string& label() const { return label_; }
  const json& descriptor() const { return descriptor_; }

  cplx evaluate(std::span<const double> p) const;
  cplx evaluate(const Eigen::VectorXd& p) const { return evaluate(std::span<const double>(p.data(), p.size())); }

  TestFunction with_label(std::string label) const;
  TestFunction with_support(Region support) const;

 private:
  int dim_ = 0;
  bool spatial_ = false;
  std::vector<Term> terms_;
  Region support_;
  bool is_real_ = false;
  std::string label_;
  json descriptor_;
};

TestFunction bump(int dim, const Eigen::VectorXd& center, double radius, bool spatial = false);
// Spatial Laplacian of bump(); real, vanishing integral, symmetric when centered at 0.
TestFunction seed_bump(int dim, const Eigen::VectorXd& center, double radius, bool spatial = false);
// Plane-wave modulation f(x) -> f(x) e^{-i q.x} in the transform convention, i.e. p -> p + q.
TestFunction modulate(const TestFunction& f, const Eigen::VectorXd& q);
// p -> f~(lambda p).
TestFunction dilate_momentum(const TestFunction& f, double lambda);
TestFunction translate(const TestFunction& f, const Eigen::VectorXd& a);
TestFunction conjugate(const TestFunction& f);
// x -> f(-x)
TestFunction reflect(const TestFunction& f);
TestFunction klein_gordon_image(const TestFunction& f, double m);
TestFunction linear_combination(const std::vector<std::pair<cplx, TestFunction>>& parts);
TestFunction scaled(cplx c, const TestFunction& f);
// Transform (2 pi)^{-d/2} e^{i(p0 x0 - p.x)} of the point evaluation at x.
TestFunction point_source(const Eigen::VectorXd& x);

struct CentralSequencePair {
  int n = 0;
  TestFunction f1, f2;
  double norm1 = 0.0, norm2 = 0.0;  // mass-shell norms of h1, h2 before normalization
};

CentralSequencePair central_sequence_pair(int n, const TestFunction& h, const GridPtr& grid);

// <f1 + i f2 | tau_a (f1 - i f2)>
cplx coherence_scalar(const CentralSequencePair& pair, const Eigen::VectorXd& a, const GridPtr& grid);

struct CoherentTranslation {
  Eigen::VectorXd a;
  std::vector<cplx> scalars;  // one per pair
};

// First lattice point a (spacelike, right-pointing) with |coherence_scalar| > threshold for every pair.
std::optional<CoherentTranslation> select_coherent_translation(const std::vector<CentralSequencePair>& pairs,
                                                               const std::vector<Eigen::VectorXd>& lattice,
                                                               double threshold, const GridPtr& grid);
std::vector<Eigen::VectorXd> default_translation_lattice(int d);

enum class StringSide { LowerVanishing, UpperVanishing };

struct StringField {
  TestFunction h;     // spacetime function delta(x0) k(x), transform c * k~(p)
  TestFunction k;     // spatial function
  TestFunction l;     // spatial seed in the slab
  double a = 0.0;
  StringSide side = StringSide::LowerVanishing;
  double c = 0.0;
  double origin = 0.0;  // x_1 of the edge of W1; W2 = W1 + a
};

StringField string_function(double a, const TestFunction& l, StringSide side, const ModelConfig& config);
// Moves every component of the field by dx along x_1.
StringField shift_string(const StringField& s, double dx);
// Default spatial seed for string_function: a bump centered in the slab.
TestFunction default_string_seed(int spatial_dim, double a);
// The transform convention constant relating delta(x0) k(x) to its on-shell restriction.
double string_constant();

json to_json(const TestFunction& f);
TestFunction test_function_from_json(const json& j, const ModelConfig& config);

}  // namespace nlf
