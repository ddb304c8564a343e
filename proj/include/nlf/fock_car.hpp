#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "nlf/mass_shell.hpp"
#include "nlf/testfn.hpp"

namespace nlf {

struct DroppedVector {
  int input = 0;
  double residual = 0.0;  // relative norm left after projection
};

// Orthonormal modes spanning a working set of one-particle vectors.
class ModeBasis {
 public:
  ModeBasis(GridPtr grid, std::vector<OneParticleVector> modes, Eigen::MatrixXcd provenance,
            std::vector<DroppedVector> dropped, double tol);

  const GridPtr& grid() const { return grid_; }
  int size() const { return static_cast<int>(modes_.size()); }
  long fock_dim() const { return 1L << modes_.size(); }
  const std::vector<OneParticleVector>& modes() const { return modes_; }
  // Column j: expansion of input j in the modes.
  const Eigen::MatrixXcd& provenance() const { return provenance_; }
  const std::vector<DroppedVector>& dropped() const { return dropped_; }
  double tol() const { return tol_; }

  Eigen::VectorXcd coefficients(const OneParticleVector& v) const;
  // Norm of the component of v orthogonal to the span, relative to |v|.
  double residual(const OneParticleVector& v) const;
  double gram_defect() const;

 private:
  GridPtr grid_;
  std::vector<OneParticleVector> modes_;
  Eigen::MatrixXcd provenance_;
  std::vector<DroppedVector> dropped_;
  double tol_;
};

using BasisPtr = std::shared_ptr<const ModeBasis>;

constexpr double kDefaultModeTol = 1e-9;
constexpr int kDefaultMaxModes = 12;

BasisPtr build_modes(const std::vector<OneParticleVector>& vectors, double tol = kDefaultModeTol,
                     int max_modes = kDefaultMaxModes);
// Modes spanning |f> and |fbar> for every function.
BasisPtr build_modes_for(const std::vector<TestFunction>& functions, const GridPtr& grid,
                         double tol = kDefaultModeTol, int max_modes = kDefaultMaxModes);

struct FockOperator {
  BasisPtr basis;
  Eigen::MatrixXcd matrix;
  std::string label;

  FockOperator adjoint() const;
  double norm() const;  // operator norm
};

struct FockVector {
  BasisPtr basis;
  Eigen::VectorXcd components;
};

FockOperator operator*(const FockOperator& a, const FockOperator& b);
FockOperator operator+(const FockOperator& a, const FockOperator& b);
FockOperator operator-(const FockOperator& a, const FockOperator& b);
FockOperator operator*(cplx s, const FockOperator& a);
FockVector operator*(const FockOperator& a, const FockVector& v);
FockOperator anticommutator(const FockOperator& a, const FockOperator& b);
FockOperator commutator(const FockOperator& a, const FockOperator& b);

FockOperator identity(const BasisPtr& basis);
FockVector vacuum(const BasisPtr& basis);
cplx inner(const FockVector& u, const FockVector& v);
double norm(const FockVector& v);

FockOperator creation(int i, const BasisPtr& basis);
FockOperator annihilation(int i, const BasisPtr& basis);
// a^dagger(sum c_i e_i) and a(sum c_i e_i) = sum conj(c_i) a_i.
FockOperator creation(const Eigen::VectorXcd& c, const BasisPtr& basis);
FockOperator annihilation(const Eigen::VectorXcd& c, const BasisPtr& basis);

FockOperator field_plus(const TestFunction& f, const BasisPtr& basis);
FockOperator field_minus(const TestFunction& f, const BasisPtr& basis);
FockOperator field(const TestFunction& f, const BasisPtr& basis);
FockOperator twisted_field(const TestFunction& f, const BasisPtr& basis);
// phi from precomputed restrictions |f> and |fbar>.
FockOperator field(const OneParticleVector& f, const OneParticleVector& fbar, const BasisPtr& basis,
                   std::string label = "phi");

FockOperator number_N(const BasisPtr& basis);
FockOperator parity_Z(const BasisPtr& basis);
FockOperator klein_V(const BasisPtr& basis);
std::pair<FockOperator, FockOperator> parity_projectors(const BasisPtr& basis);

// <Omega, A Omega>
cplx vacuum_expectation(const FockOperator& a);
// <Omega, phi(f_1) ... phi(f_n) Omega> through the matrix representation.
cplx vacuum_expectation_matrix(const std::vector<TestFunction>& fs, const BasisPtr& basis);
// The same quantity as the Pfaffian of A_ij = <fbar_i|f_j>.
cplx vacuum_expectation_wick(const std::vector<TestFunction>& fs, const GridPtr& grid);

// Pfaffian of an antisymmetric matrix (Parlett-Reid elimination with pivoting).
cplx pfaffian(Eigen::MatrixXcd a);

// Layout: uint64 rows, uint64 cols, then row-major (re, im) doubles, little endian.
void write_binary(std::ostream& os, const Eigen::MatrixXcd& m);
Eigen::MatrixXcd read_binary(std::istream& is);

}  // namespace nlf
