#pragma once

#include <Eigen/Dense>

#include <complex>
#include <memory>
#include <vector>

#include "nlf/special.hpp"

namespace nlf {

class TestFunction;

struct ModelConfig {
  int d = 2;
  double m = 1.0;

  void validate() const;
};

struct GridSpec {
  int nodes = 512;  // per axis; a multiple of order when larger than order
  int order = 16;   // Gauss-Legendre panel order
  double theta_max = 7.0;
  double cutoff = 0.0;   // d >= 3; 0 selects 8 m
  double grading = 0.0;  // d = 2; panels uniform in theta + grading * sinh(theta)
};

enum class GridKind { Rapidity, Tensor };

// Quadrature for <f|g> = pi * int dp / omega(p) conj(f(p)) g(p) on the upper shell.
class MassShellGrid {
 public:
  MassShellGrid(const ModelConfig& config, const GridSpec& spec);

  const ModelConfig& config() const { return config_; }
  const GridSpec& spec() const { return spec_; }
  GridKind kind() const { return kind_; }
  int size() const { return static_cast<int>(weights_.size()); }
  int spatial_dim() const { return config_.d - 1; }

  // Row i holds the spatial momentum of node i.
  const Eigen::MatrixXd& momenta() const { return momenta_; }
  const Eigen::VectorXd& omega() const { return omega_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  // Rapidity of each node (d = 2 only).
  const Eigen::VectorXd& rapidity() const { return rapidity_; }
  // Index of the node at -p.
  int mirror(int i) const { return mirror_[static_cast<std::size_t>(i)]; }

 private:
  ModelConfig config_;
  GridSpec spec_;
  GridKind kind_;
  Eigen::MatrixXd momenta_;
  Eigen::VectorXd omega_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd rapidity_;
  std::vector<int> mirror_;
};

using GridPtr = std::shared_ptr<const MassShellGrid>;

GridPtr build_grid(const ModelConfig& config, const GridSpec& spec);

struct OneParticleVector {
  GridPtr grid;
  Eigen::VectorXcd values;

  double norm() const;
};

OneParticleVector operator+(const OneParticleVector& u, const OneParticleVector& v);
OneParticleVector operator-(const OneParticleVector& u, const OneParticleVector& v);
OneParticleVector operator*(cplx s, const OneParticleVector& u);

OneParticleVector restrict_to_shell(const TestFunction& f, const GridPtr& grid);

cplx inner_product(const OneParticleVector& u, const OneParticleVector& v);

// <fbar|g> - <gbar|f>
cplx commutator_value(const TestFunction& f, const TestFunction& g, const GridPtr& grid);
// <gbar|f> + <fbar|g>
cplx anticommutator_value(const TestFunction& f, const TestFunction& g, const GridPtr& grid);

// x -> {phi(h), phi(delta_x)} for each spacetime point x.
std::vector<cplx> pauli_jordan_profile(const TestFunction& h, const std::vector<Eigen::VectorXd>& points,
                                       const GridPtr& grid);

}  // namespace nlf
