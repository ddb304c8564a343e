#include <cmath>

#include "nlf/errors.hpp"
#include "nlf/fock_car.hpp"

namespace nlf {

cplx pfaffian(Eigen::MatrixXcd a) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw StructuralError("pfaffian: matrix is not square");
  if (n % 2) return 0.0;
  cplx pf = 1.0;
  for (Eigen::Index k = 0; k + 1 < n; k += 2) {
    // Pivot the largest entry of column k below the diagonal into row k+1.
    Eigen::Index kp = k + 1;
    a.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&kp);
    kp += k + 1;
    if (kp != k + 1) {
      a.row(k + 1).swap(a.row(kp));
      a.col(k + 1).swap(a.col(kp));
      pf = -pf;
    }
    if (a(k + 1, k) == 0.0) return 0.0;
    pf *= a(k, k + 1);
    if (k + 2 < n) {
      const Eigen::Index r = n - k - 2;
      const Eigen::VectorXcd tau = a.row(k).tail(r).transpose() / a(k, k + 1);
      const Eigen::VectorXcd col = a.col(k + 1).tail(r);
      a.bottomRightCorner(r, r) += tau * col.transpose() - col * tau.transpose();
    }
  }
  return pf;
}

}  // namespace nlf
