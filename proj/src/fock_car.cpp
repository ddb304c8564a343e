#include "nlf/fock_car.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>

#include "nlf/errors.hpp"

namespace nlf {

// ---------------------------------------------------------------- modes

ModeBasis::ModeBasis(GridPtr grid, std::vector<OneParticleVector> modes, Eigen::MatrixXcd provenance,
                     std::vector<DroppedVector> dropped, double tol)
    : grid_(std::move(grid)),
      modes_(std::move(modes)),
      provenance_(std::move(provenance)),
      dropped_(std::move(dropped)),
      tol_(tol) {}

Eigen::VectorXcd ModeBasis::coefficients(const OneParticleVector& v) const {
  Eigen::VectorXcd c(size());
  for (int i = 0; i < size(); ++i) c[i] = inner_product(modes_[static_cast<std::size_t>(i)], v);
  return c;
}

double ModeBasis::residual(const OneParticleVector& v) const {
  const double n = v.norm();
  if (n == 0.0) return 0.0;
  OneParticleVector r = v;
  const Eigen::VectorXcd c = coefficients(v);
  for (int i = 0; i < size(); ++i) r = r - c[i] * modes_[static_cast<std::size_t>(i)];
  return r.norm() / n;
}

double ModeBasis::gram_defect() const {
  double worst = 0.0;
  for (int i = 0; i < size(); ++i)
    for (int j = 0; j < size(); ++j) {
      const cplx g = inner_product(modes_[static_cast<std::size_t>(i)], modes_[static_cast<std::size_t>(j)]);
      worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

BasisPtr build_modes(const std::vector<OneParticleVector>& vectors, double tol, int max_modes) {
  if (vectors.empty()) throw EmptyBasisError("build_modes: no input vectors");
  if (!(tol > 0.0)) throw ConfigurationError("build_modes: tolerance must be positive");
  const GridPtr grid = vectors.front().grid;
  std::vector<OneParticleVector> modes;
  std::vector<DroppedVector> dropped;
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    const OneParticleVector& v = vectors[j];
    if (v.grid != grid) throw StructuralError("build_modes: inputs live on different grids");
    const double n0 = v.norm();
    OneParticleVector r = v;
    // Two projection sweeps keep the Gram matrix at the identity to rounding level.
    for (int sweep = 0; sweep < 2; ++sweep)
      for (const OneParticleVector& e : modes) r = r - inner_product(e, r) * e;
    const double rel = n0 > 0.0 ? r.norm() / n0 : 0.0;
    if (n0 == 0.0 || rel < tol) {
      dropped.push_back({static_cast<int>(j), rel});
      continue;
    }
    if (static_cast<int>(modes.size()) >= max_modes) {
      std::ostringstream os;
      os << "build_modes: working set needs more than " << max_modes << " modes";
      throw CapacityError(os.str());
    }
    modes.push_back((1.0 / r.norm()) * r);
  }
  if (modes.empty()) throw EmptyBasisError("build_modes: every input is numerically zero");
  Eigen::MatrixXcd prov(static_cast<Eigen::Index>(modes.size()), static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j)
    for (std::size_t i = 0; i < modes.size(); ++i)
      prov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = inner_product(modes[i], vectors[j]);
  return std::make_shared<const ModeBasis>(grid, std::move(modes), std::move(prov), std::move(dropped), tol);
}

BasisPtr build_modes_for(const std::vector<TestFunction>& functions, const GridPtr& grid, double tol, int max_modes) {
  std::vector<OneParticleVector> vs;
  for (const TestFunction& f : functions) {
    vs.push_back(restrict_to_shell(f, grid));
    if (!f.is_real()) vs.push_back(restrict_to_shell(conjugate(f), grid));
  }
  return build_modes(vs, tol, max_modes);
}

// ---------------------------------------------------------------- operator algebra

namespace {

void require_same_basis(const FockOperator& a, const FockOperator& b) {
  if (!a.basis || a.basis != b.basis) throw StructuralError("Fock operators built on different mode bases");
}

FockOperator zero_operator(const BasisPtr& basis, std::string label) {
  const long n = basis->fock_dim();
  return {basis, Eigen::MatrixXcd::Zero(n, n), std::move(label)};
}

// Number of occupied modes below i in the occupation bitmask s.
int occupied_below(unsigned long s, int i) { return std::popcount(s & ((1UL << i) - 1UL)); }

}  // namespace

FockOperator FockOperator::adjoint() const { return {basis, matrix.adjoint(), label + "*"}; }

double FockOperator::norm() const {
  if (matrix.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(matrix);
  return svd.singularValues()(0);
}

FockOperator operator*(const FockOperator& a, const FockOperator& b) {
  require_same_basis(a, b);
  return {a.basis, a.matrix * b.matrix, a.label + b.label};
}

FockOperator operator+(const FockOperator& a, const FockOperator& b) {
  require_same_basis(a, b);
  return {a.basis, a.matrix + b.matrix, a.label + "+" + b.label};
}

FockOperator operator-(const FockOperator& a, const FockOperator& b) {
  require_same_basis(a, b);
  return {a.basis, a.matrix - b.matrix, a.label + "-" + b.label};
}

FockOperator operator*(cplx s, const FockOperator& a) { return {a.basis, s * a.matrix, a.label}; }

FockVector operator*(const FockOperator& a, const FockVector& v) {
  if (a.basis != v.basis) throw StructuralError("operator and vector built on different mode bases");
  return {v.basis, a.matrix * v.components};
}

FockOperator anticommutator(const FockOperator& a, const FockOperator& b) {
  require_same_basis(a, b);
  return {a.basis, a.matrix * b.matrix + b.matrix * a.matrix, "{" + a.label + "," + b.label + "}"};
}

FockOperator commutator(const FockOperator& a, const FockOperator& b) {
  require_same_basis(a, b);
  return {a.basis, a.matrix * b.matrix - b.matrix * a.matrix, "[" + a.label + "," + b.label + "]"};
}

FockOperator identity(const BasisPtr& basis) {
  const long n = basis->fock_dim();
  return {basis, Eigen::MatrixXcd::Identity(n, n), "1"};
}

FockVector vacuum(const BasisPtr& basis) {
  FockVector v{basis, Eigen::VectorXcd::Zero(basis->fock_dim())};
  v.components[0] = 1.0;
  return v;
}

cplx inner(const FockVector& u, const FockVector& v) {
  if (u.basis != v.basis) throw StructuralError("Fock vectors built on different mode bases");
  return u.components.dot(v.components);
}

double norm(const FockVector& v) { return v.components.norm(); }

// ---------------------------------------------------------------- CAR generators

FockOperator creation(const Eigen::VectorXcd& c, const BasisPtr& basis) {
  const int m = basis->size();
  if (c.size() != m) throw StructuralError("creation: coefficient vector size differs from the mode count");
  FockOperator out = zero_operator(basis, "a+");
  const unsigned long dim = static_cast<unsigned long>(basis->fock_dim());
  for (unsigned long s = 0; s < dim; ++s)
    for (int i = 0; i < m; ++i) {
      if (c[i] == 0.0 || (s >> i) & 1UL) continue;
      const double sign = (occupied_below(s, i) % 2) ? -1.0 : 1.0;
      out.matrix(static_cast<Eigen::Index>(s | (1UL << i)), static_cast<Eigen::Index>(s)) += sign * c[i];
    }
  return out;
}

FockOperator annihilation(const Eigen::VectorXcd& c, const BasisPtr& basis) {
  FockOperator a = creation(c, basis).adjoint();
  a.label = "a";
  return a;
}

FockOperator creation(int i, const BasisPtr& basis) {
  if (i < 0 || i >= basis->size()) throw StructuralError("creation: mode index out of range");
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(basis->size());
  c[i] = 1.0;
  FockOperator out = creation(c, basis);
  out.label = "a+" + std::to_string(i);
  return out;
}

FockOperator annihilation(int i, const BasisPtr& basis) {
  FockOperator out = creation(i, basis).adjoint();
  out.label = "a" + std::to_string(i);
  return out;
}

namespace {

Eigen::VectorXcd span_coefficients(const OneParticleVector& v, const std::string& label, const BasisPtr& basis) {
  if (v.grid != basis->grid()) throw StructuralError("field: vector and basis live on different grids");
  const double r = basis->residual(v);
  if (r > basis->tol()) {
    std::ostringstream os;
    os << "field: |" << label << "> leaves the mode span (relative residual " << r << ")";
    throw OutOfSpanError(os.str(), r);
  }
  return basis->coefficients(v);
}

Eigen::VectorXcd span_coefficients(const TestFunction& f, const BasisPtr& basis) {
  return span_coefficients(restrict_to_shell(f, basis->grid()), f.label(), basis);
}

}  // namespace

FockOperator field_plus(const TestFunction& f, const BasisPtr& basis) {
  FockOperator out = creation(span_coefficients(f, basis), basis);
  out.label = "phi+(" + f.label() + ")";
  return out;
}

FockOperator field_minus(const TestFunction& f, const BasisPtr& basis) {
  FockOperator out = annihilation(span_coefficients(conjugate(f), basis), basis);
  out.label = "phi-(" + f.label() + ")";
  return out;
}

FockOperator field(const TestFunction& f, const BasisPtr& basis) {
  FockOperator out = field_plus(f, basis) + field_minus(f, basis);
  out.label = "phi(" + f.label() + ")";
  return out;
}

FockOperator field(const OneParticleVector& f, const OneParticleVector& fbar, const BasisPtr& basis,
                   std::string label) {
  FockOperator out = creation(span_coefficients(f, label, basis), basis) +
                     annihilation(span_coefficients(fbar, label + " conjugate", basis), basis);
  out.label = std::move(label);
  return out;
}

FockOperator number_N(const BasisPtr& basis) {
  FockOperator out = zero_operator(basis, "N");
  for (long s = 0; s < basis->fock_dim(); ++s) out.matrix(s, s) = std::popcount(static_cast<unsigned long>(s));
  return out;
}

FockOperator parity_Z(const BasisPtr& basis) {
  FockOperator out = zero_operator(basis, "Z");
  for (long s = 0; s < basis->fock_dim(); ++s)
    out.matrix(s, s) = (std::popcount(static_cast<unsigned long>(s)) % 2) ? -1.0 : 1.0;
  return out;
}

FockOperator klein_V(const BasisPtr& basis) {
  FockOperator out = zero_operator(basis, "V");
  for (long s = 0; s < basis->fock_dim(); ++s) {
    const long n = std::popcount(static_cast<unsigned long>(s));
    out.matrix(s, s) = ((n * (n - 1) / 2) % 2) ? -1.0 : 1.0;
  }
  return out;
}

FockOperator twisted_field(const TestFunction& f, const BasisPtr& basis) {
  const FockOperator v = klein_V(basis);
  const FockOperator phi = field(f, basis);
  // V is diagonal with entries +-1, so V^{-1} = V.
  FockOperator out = v * phi * v;
  const FockOperator alt = (field_plus(f, basis) - field_minus(f, basis)) * parity_Z(basis);
  const double defect = (out.matrix - alt.matrix).norm();
  if (defect > 1e-10 * std::max(1.0, phi.matrix.norm())) {
    std::ostringstream os;
    os << "twisted_field: V phi V differs from (phi+ - phi-) Z by " << defect;
    throw StructuralError(os.str());
  }
  out.label = "phihat(" + f.label() + ")";
  return out;
}

std::pair<FockOperator, FockOperator> parity_projectors(const BasisPtr& basis) {
  const FockOperator one = identity(basis), z = parity_Z(basis);
  FockOperator even = 0.5 * (one + z), odd = 0.5 * (one - z);
  even.label = "P_even";
  odd.label = "P_odd";
  return {even, odd};
}

cplx vacuum_expectation(const FockOperator& a) { return a.matrix(0, 0); }

cplx vacuum_expectation_matrix(const std::vector<TestFunction>& fs, const BasisPtr& basis) {
  FockVector v = vacuum(basis);
  for (auto it = fs.rbegin(); it != fs.rend(); ++it) v = field(*it, basis) * v;
  return v.components[0];
}

cplx vacuum_expectation_wick(const std::vector<TestFunction>& fs, const GridPtr& grid) {
  const int n = static_cast<int>(fs.size());
  if (n == 0) return 1.0;
  if (n % 2) return 0.0;
  std::vector<OneParticleVector> v, vbar;
  for (const TestFunction& f : fs) {
    v.push_back(restrict_to_shell(f, grid));
    vbar.push_back(restrict_to_shell(conjugate(f), grid));
  }
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      a(i, j) = inner_product(vbar[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(j)]);
      a(j, i) = -a(i, j);
    }
  return pfaffian(std::move(a));
}

// ---------------------------------------------------------------- binary dump

namespace {

template <class T>
void put_le(std::ostream& os, T value) {
  static_assert(std::endian::native == std::endian::little, "binary dump assumes a little-endian host");
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw StructuralError("read_binary: truncated input");
  return value;
}

}  // namespace

void write_binary(std::ostream& os, const Eigen::MatrixXcd& m) {
  put_le<std::uint64_t>(os, static_cast<std::uint64_t>(m.rows()));
  put_le<std::uint64_t>(os, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      put_le<double>(os, m(r, c).real());
      put_le<double>(os, m(r, c).imag());
    }
}

Eigen::MatrixXcd read_binary(std::istream& is) {
  const auto rows = get_le<std::uint64_t>(is);
  const auto cols = get_le<std::uint64_t>(is);
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double re = get_le<double>(is);
      const double im = get_le<double>(is);
      m(r, c) = cplx(re, im);
    }
  return m;
}

}  // namespace nlf
