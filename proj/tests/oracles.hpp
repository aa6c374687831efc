// Reference computations for the tests. Nothing here calls into the library
// code under test except for plain data accessors (rows, partition bounds).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "streampred/cms_histogram.hpp"

namespace oracle {

// Bin id by linear scan over the right edges lo + (hi - lo) k / K.
inline std::size_t bin_of(double y, double lo, double hi, std::size_t bins) {
  if (y <= lo) return 1;
  for (std::size_t k = 1; k <= bins; ++k) {
    const double right = k == bins ? hi
                                   : lo + (hi - lo) * static_cast<double>(k) /
                                              static_cast<double>(bins);
    if (y <= right) return k;
  }
  return bins;
}

inline std::vector<std::uint64_t> histogram(const std::vector<double>& ys,
                                            double lo, double hi,
                                            std::size_t bins) {
  std::vector<std::uint64_t> h(bins, 0);
  for (const double y : ys) ++h[bin_of(y, lo, hi, bins) - 1];
  return h;
}

// Replays every row of the sketch by hand and takes the per-bin minimum.
inline std::vector<std::uint64_t> cms_minimums(
    const streampred::CmsHistogram& sketch, const std::vector<double>& ys) {
  const auto& part = sketch.partition();
  const std::size_t bins = part.bins();
  const auto exact = histogram(ys, part.lo(), part.hi(), bins);
  std::vector<std::uint64_t> out(bins, std::numeric_limits<std::uint64_t>::max());
  for (const auto& row : sketch.rows()) {
    std::vector<std::uint64_t> cells(row.w, 0);
    auto bucket = [&](std::size_t k) { return ((row.a * k + row.b) % row.p) % row.w; };
    for (std::size_t k = 1; k <= bins; ++k) cells[bucket(k)] += exact[k - 1];
    for (std::size_t k = 1; k <= bins; ++k) {
      out[k - 1] = std::min(out[k - 1], cells[bucket(k)]);
    }
  }
  return out;
}

inline Eigen::MatrixXd ar1(std::size_t n, double rho) {
  Eigen::MatrixXd k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      k(i, j) = std::pow(rho, std::abs(static_cast<double>(i) - static_cast<double>(j)));
    }
  }
  return k;
}

// log of the marginal density of y under
//   y | s2 ~ N(gamma 1, s2 (I + K + delta2 I)),  s2 ~ IG(alpha, beta),
// with the Gaussian part evaluated in closed form and s2 integrated
// numerically on the log scale.
inline double log_marginal(const Eigen::VectorXd& y, double rho, double gamma,
                           double delta2, double alpha, double beta) {
  const auto n = static_cast<std::size_t>(y.size());
  const Eigen::MatrixXd c =
      Eigen::MatrixXd::Identity(n, n) * (1.0 + delta2) + ar1(n, rho);
  const Eigen::VectorXd r = y - Eigen::VectorXd::Constant(y.size(), gamma);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(c);
  const double q = r.dot(lu.solve(r));
  const double logdet = std::log(lu.determinant());
  const double nd = static_cast<double>(n);

  // log integrand in u = log s2, including the Jacobian e^u.
  auto log_f = [&](double u) {
    return -0.5 * nd * (std::log(2.0 * std::numbers::pi) + u) - 0.5 * logdet -
           0.5 * q * std::exp(-u) + alpha * std::log(beta) - std::lgamma(alpha) -
           (alpha + 1.0) * u - beta * std::exp(-u) + u;
  };
  const double peak = std::log((0.5 * q + beta) / (0.5 * nd + alpha));
  const double top = log_f(peak);
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double mass = integrator.integrate(
      [&](double s) { return std::exp(log_f(peak + s) - top); }, -60.0, 60.0);
  return top + std::log(mass);
}

// Predictive density of y_next as a ratio of two marginals.
inline double predictive_ratio(double y_next, const Eigen::VectorXd& y,
                               double rho, double gamma, double delta2,
                               double alpha, double beta) {
  Eigen::VectorXd ext(y.size() + 1);
  ext << y, y_next;
  return std::exp(log_marginal(ext, rho, gamma, delta2, alpha, beta) -
                  log_marginal(y, rho, gamma, delta2, alpha, beta));
}

// Conditional mean of the last coordinate under the same Gaussian model.
inline double conditional_mean(const Eigen::VectorXd& y, double rho,
                               double gamma, double delta2) {
  const auto n = static_cast<std::size_t>(y.size());
  const Eigen::MatrixXd c =
      Eigen::MatrixXd::Identity(n + 1, n + 1) * (1.0 + delta2) + ar1(n + 1, rho);
  const Eigen::MatrixXd c11 = c.topLeftCorner(n, n);
  const Eigen::VectorXd c12 = c.topRightCorner(n, 1);
  const Eigen::VectorXd r = y - Eigen::VectorXd::Constant(y.size(), gamma);
  return gamma + c12.dot(c11.fullPivLu().solve(r));
}

// Direct evaluation of log g(delta2) with explicit inverses and an LU
// determinant.
inline double log_g_dense(const Eigen::VectorXd& y, const Eigen::MatrixXd& k,
                          double gamma, double delta2, double sigma2) {
  const auto n = y.size();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd p = (id + k).inverse();
  const Eigen::MatrixXd inner = p + id / delta2;
  const Eigen::MatrixXd v = inner.inverse();
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(n);
  const double quad = y.dot(p * v * p * y) + 2.0 * gamma / delta2 * y.dot(p * v * one) +
                      gamma * gamma / (delta2 * delta2) * one.dot(v * one) -
                      static_cast<double>(n) * gamma * gamma / delta2;
  return 0.5 * std::log(inner.determinant()) -
         0.5 * static_cast<double>(n) * std::log(delta2) + quad / (2.0 * sigma2);
}

}  // namespace oracle
