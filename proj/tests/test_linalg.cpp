#include <cmath>
#include <random>

#include "doctest.h"
#include "streampred/errors.hpp"
#include "streampred/linalg.hpp"

using namespace streampred;

namespace {

Matrix random_spd(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Matrix b(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) b(i, j) = z(rng);
  }
  return b * b.transpose() + 0.5 * Matrix::Identity(n, n);
}

}  // namespace

TEST_CASE("identity") {
  const Matrix id = Matrix::Identity(4, 4);
  const Vector b = Vector::LinSpaced(4, -1.0, 2.0);
  CHECK((spd_solve(id, b) - b).norm() == 0.0);
  CHECK(spd_logdet(id) == 0.0);
  CHECK((spd_inv_sqrt(id) - id).norm() < 1e-14);
}

TEST_CASE("diagonal example") {
  Matrix a(2, 2);
  a << 2, 0, 0, 8;
  Vector b(2);
  b << 2, 8;
  const Vector x = spd_solve(a, b);
  CHECK(x(0) == doctest::Approx(1.0));
  CHECK(x(1) == doctest::Approx(1.0));
  CHECK(spd_logdet(a) == doctest::Approx(std::log(16.0)));
}

TEST_CASE("random SPD reconstruction and residuals") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Matrix a = random_spd(5, seed);
    const Matrix r = spd_inv_sqrt(a);
    CHECK((r * r * a - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-8);
    const Vector b = Vector::Random(5);
    const Vector x = spd_solve(a, b);
    CHECK((a * x - b).norm() <= 1e-8 * b.norm());
    CHECK((spd_inverse(a) * a - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(spd_logdet(a) == doctest::Approx(std::log(a.determinant())).epsilon(1e-10));
  }
}

TEST_CASE("non-SPD input throws with eigenvalue diagnostics") {
  Matrix a(2, 2);
  a << 1, 2, 2, 1;
  try {
    spd_solve(a, Vector(Vector::Ones(2)));
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("min eigenvalue") != std::string::npos);
  }
  Matrix asym(2, 2);
  asym << 1, 0.5, 0, 1;
  CHECK_THROWS_AS(spd_logdet(asym), NumericalError);
  CHECK_THROWS_AS(spd_inv_sqrt(-Matrix::Identity(3, 3)), NumericalError);
  CHECK_THROWS_AS(spd_solve(Matrix(Matrix::Identity(2, 2)), Vector(Vector::Ones(3))), NumericalError);
}

TEST_CASE("jitter rescues a numerically singular PSD matrix") {
  // Rank one plus a perturbation far below double resolution of the diagonal.
  const Vector v = Vector::Ones(6);
  const Matrix a = v * v.transpose();
  const Vector x = spd_solve(a, v);
  CHECK(std::isfinite(x.sum()));
}

TEST_CASE("kernel spectrum reconstructs I + K") {
  const Matrix k = random_spd(6, 9);
  const KernelSpectrum sp = KernelSpectrum::of(k);
  const Matrix s = sp.vectors * sp.values.asDiagonal() * sp.vectors.transpose();
  CHECK((s - (Matrix::Identity(6, 6) + k)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(sp.size() == 6);
  CHECK(sp.values.minCoeff() > 0.0);
}
