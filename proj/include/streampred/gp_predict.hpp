#ifndef STREAMPRED_GP_PREDICT_HPP
#define STREAMPRED_GP_PREDICT_HPP

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <span>

#include "streampred/linalg.hpp"

namespace streampred {

// n x n matrix with entries rho^|i-j|. Throws InvalidKernel unless |rho| < 1.
Matrix build_ar1(std::size_t n, double rho);

using KernelBuilder = std::function<Matrix(std::size_t)>;

// Kernel family indexed by context length, with a per-size cache of the
// spectrum of I + K. The default family is AR(1); any other SPD family can
// be plugged in through a KernelBuilder. Not thread-safe: give each
// evaluator its own instance.
class Ar1Model {
 public:
  explicit Ar1Model(double rho);
  explicit Ar1Model(KernelBuilder builder);

  double rho() const { return rho_; }
  Matrix kernel(std::size_t n) const { return builder_(n); }
  const KernelSpectrum& spectrum(std::size_t n) const;

 private:
  double rho_ = 0.0;
  KernelBuilder builder_;
  mutable std::map<std::size_t, KernelSpectrum> cache_;
};

// ---- zero-bias GP predictor ----------------------------------------------

// mu* = K12' (K11 + I)^{-1} y where K is the kernel at size n+1.
double gpp_mean(const Vector& y, double rho);
double gpp_mean(const Vector& y, const Ar1Model& model);

// Sigma* = sigma2 * [(K22 + 1) - K21 (K11 + I)^{-1} K12].
double gpp_var(double rho, std::size_t n, double sigma2);

// ---- hyperparameter estimation -------------------------------------------

struct Moments {
  double s2 = 0.0;
  double s4 = 0.0;
};

// Whitens y' = (I + K)^{-1/2} y and returns the central sample moments
// S_k = 1/(n-1) sum (y'_i - mean)^k for k = 2, 4. Needs n >= 2.
Moments whiten_moments(const Vector& y, const Matrix& kernel);
Moments whiten_moments(const Vector& y, const KernelSpectrum& spectrum);

struct AlphaBeta {
  double alpha = 0.0;
  double beta = 0.0;
};

// alpha = S2^2 / (S4 - S2^2) + 2, beta = S2 (alpha + 1). With literal set
// the first numerator is S2 instead of S2^2. Throws DegenerateMoments when
// S4 <= S2^2.
AlphaBeta estimate_alpha_beta(double s2, double s4, bool literal = false);

// V = [(I + K)^{-1} + I / delta2]^{-1}.
Matrix compute_V(const Matrix& kernel, double delta2);

// gamma = y' (I+K)^{-1} V 1 / 1' (I - V / delta2) 1. Throws DegenerateBias
// when the denominator vanishes.
double estimate_gamma(const Vector& y, const Matrix& kernel, double delta2);
double estimate_gamma(const Vector& y, const KernelSpectrum& spectrum,
                      double delta2);

// log g(delta2): the delta-dependent factor of the bias-marginal likelihood,
//   1/2 log|(I+K)^{-1} + I/delta2| - n/2 log delta2
//   + 1/(2 sigma2) [ y'PVPy + 2 gamma/delta2 y'PV1
//                    + gamma^2/delta2^2 1'V1 - n gamma^2/delta2 ]
// with P = (I+K)^{-1}.
double log_g_delta(const Vector& y, const Matrix& kernel, double gamma,
                   double delta2, double sigma2);

inline constexpr std::array<double, 5> kDefaultDelta2Grid{0.01, 0.05, 0.1, 0.5,
                                                          1.0};

// argmax of log_g_delta over the grid; the first maximizer wins ties.
// Throws InvalidConfig for an empty grid or a non-positive entry.
double select_delta(const Vector& y, const Matrix& kernel, double gamma,
                    double sigma2, std::span<const double> grid);

// ---- random-bias posterior predictive ------------------------------------

struct RbHyper {
  double alpha = 3.0;
  double beta = 2.0;
  double gamma = 0.0;
  double delta2 = 0.01;
  double sigma2_hat = 1.0;

  void validate() const;
};

// All intermediate quantities of the Student-t predictive for y_{n+1}.
// Size-n quantities (V, mu, alpha_star, beta_star) describe the posterior
// given y; Gamma1/Gamma2/Delta are built at size n+1 and then partitioned
// into (Gamma1_nn, g1, gamma1) and (Gamma2_n, gamma2).
struct RbComponents {
  Matrix V;
  Vector mu;
  double alpha_star = 0.0;
  double beta_star = 0.0;
  Matrix Gamma1;
  Vector Gamma2;
  double Delta = 0.0;
  Vector g1;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double A1 = 0.0;
  double A2 = 0.0;
  double beta_dstar = 0.0;
};

RbComponents rb_components(const Vector& y, double rho, const RbHyper& hyper);
RbComponents rb_components(const Vector& y, const Ar1Model& model,
                           const RbHyper& hyper);

// A1, the location and mode of the predictive. The model overload only
// forms the last column of Gamma1, so it is O(n^2) once the spectrum of
// size n+1 is cached.
double rb_predict(const Vector& y, double rho, const RbHyper& hyper);
double rb_predict(const Vector& y, const Ar1Model& model, const RbHyper& hyper);

struct StudentT {
  double dof = 1.0;
  double location = 0.0;
  double scale2 = 1.0;

  double log_pdf(double x) const;
  double pdf(double x) const;
};

// Student-t with 2*alpha + n degrees of freedom, location A1 and squared
// scale beta** / ((2 alpha + n) / 2) / gamma1.
StudentT rb_predictive(const RbComponents& c, std::size_t n,
                       const RbHyper& hyper);
double rb_predictive_density(double y_next, const Vector& y, double rho,
                             const RbHyper& hyper);

}  // namespace streampred

#endif  // STREAMPRED_GP_PREDICT_HPP
