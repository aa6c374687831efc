#ifndef STREAMPRED_LINALG_HPP
#define STREAMPRED_LINALG_HPP

#include <Eigen/Dense>

namespace streampred {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Symmetric positive definite helpers. Factorizations retry with a diagonal
// jitter of 1e-12, 1e-10 and 1e-8 (relative to the mean diagonal) before
// throwing NumericalError.
Vector spd_solve(const Matrix& a, const Vector& b);
Matrix spd_solve(const Matrix& a, const Matrix& b);
Matrix spd_inverse(const Matrix& a);
double spd_logdet(const Matrix& a);
// Inverse square root through a symmetric eigendecomposition.
Matrix spd_inv_sqrt(const Matrix& a);

// Eigendecomposition of S = I + K for a kernel matrix K. Every GP quantity
// that is a matrix function of S reduces to a diagonal in this basis.
struct KernelSpectrum {
  Matrix kernel;   // K
  Vector values;   // eigenvalues of I + K, ascending, all > 0
  Matrix vectors;  // orthonormal eigenvectors (columns)

  static KernelSpectrum of(const Matrix& kernel);
  Eigen::Index size() const { return kernel.rows(); }
};

}  // namespace streampred

#endif  // STREAMPRED_LINALG_HPP
