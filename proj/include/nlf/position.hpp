#pragma once

#include <Eigen/Dense>

#include <vector>

#include "nlf/testfn.hpp"

namespace nlf {

// Trapezoidal inverse transform. Zero fields select automatic values:
// the cutoff from the narrowest mollifier factor, the spacing from the extent of
// the queried points plus the function's own extent so periodic images stay away.
struct ProfileSpec {
  double cutoff = 0.0;
  double spacing = 0.0;
  double mollifier_reach = 900.0;  // |B(u)| is below 1e-13 B(0) beyond this argument
  int max_joint_nodes = 256;       // per axis, non-separable terms only
};

// f(x) at each point, in the function's own coordinates (time first for spacetime functions).
std::vector<cplx> position_profile(const TestFunction& f, const std::vector<Eigen::VectorXd>& points,
                                   const ProfileSpec& spec = {});

// Tensor grid with `count` points per axis on [lo_i, hi_i].
std::vector<Eigen::VectorXd> tensor_points(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int count);

struct SupportCheck {
  double peak = 0.0;         // max |f| over all samples
  double outside_max = 0.0;  // max |f| over samples outside the region
  double ratio = 0.0;
  Eigen::VectorXd worst;     // sample attaining outside_max
  int outside_count = 0;
};

SupportCheck support_check(const TestFunction& f, const std::vector<Eigen::VectorXd>& samples, const Region& region,
                           const ProfileSpec& spec = {});

}  // namespace nlf
