#include "streampred/linalg.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "streampred/errors.hpp"

namespace streampred {

namespace {

void require_square_symmetric(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw NumericalError("SPD routine needs a non-empty square matrix");
  }
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw NumericalError("SPD routine got a non-symmetric matrix");
  }
}

[[noreturn]] void throw_not_spd(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  std::ostringstream msg;
  msg << "matrix is not positive definite (n=" << a.rows()
      << ", min eigenvalue=" << es.eigenvalues().minCoeff()
      << ", max eigenvalue=" << es.eigenvalues().maxCoeff() << ")";
  throw NumericalError(msg.str());
}

Eigen::LLT<Matrix> factor(const Matrix& a) {
  require_square_symmetric(a);
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() == Eigen::Success) return llt;
  const double base = a.diagonal().mean();
  for (const double jitter : std::array{1e-12, 1e-10, 1e-8}) {
    Matrix shifted = a;
    shifted.diagonal().array() += jitter * base;
    llt.compute(shifted);
    if (llt.info() == Eigen::Success) return llt;
  }
  throw_not_spd(a);
}

}  // namespace

Vector spd_solve(const Matrix& a, const Vector& b) {
  if (b.size() != a.rows()) throw NumericalError("spd_solve: size mismatch");
  return factor(a).solve(b);
}

Matrix spd_solve(const Matrix& a, const Matrix& b) {
  if (b.rows() != a.rows()) throw NumericalError("spd_solve: size mismatch");
  return factor(a).solve(b);
}

Matrix spd_inverse(const Matrix& a) {
  Matrix inv = factor(a).solve(Matrix::Identity(a.rows(), a.cols()));
  return 0.5 * (inv + inv.transpose());
}

double spd_logdet(const Matrix& a) {
  const Eigen::LLT<Matrix> llt = factor(a);
  const Matrix& l = llt.matrixLLT();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) acc += std::log(l(i, i));
  return 2.0 * acc;
}

Matrix spd_inv_sqrt(const Matrix& a) {
  require_square_symmetric(a);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
    throw_not_spd(a);
  }
  const Vector d = es.eigenvalues().array().rsqrt();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

KernelSpectrum KernelSpectrum::of(const Matrix& kernel) {
  require_square_symmetric(kernel);
  const Matrix s = Matrix::Identity(kernel.rows(), kernel.cols()) + kernel;
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
    throw_not_spd(s);
  }
  return KernelSpectrum{kernel, es.eigenvalues(), es.eigenvectors()};
}

}  // namespace streampred
