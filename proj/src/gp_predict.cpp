#include "streampred/gp_predict.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "streampred/errors.hpp"

namespace streampred {

Matrix build_ar1(std::size_t n, double rho) {
  if (!(std::abs(rho) < 1.0)) {
    throw InvalidKernel("AR(1) kernel needs |rho| < 1");
  }
  if (n == 0) throw InvalidKernel("AR(1) kernel needs n >= 1");
  const auto size = static_cast<Eigen::Index>(n);
  Matrix k(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    k(i, i) = 1.0;
    double p = 1.0;
    for (Eigen::Index j = i + 1; j < size; ++j) {
      p *= rho;
      k(i, j) = p;
      k(j, i) = p;
    }
  }
  return k;
}

Ar1Model::Ar1Model(double rho)
    : rho_(rho), builder_([rho](std::size_t n) { return build_ar1(n, rho); }) {
  if (!(std::abs(rho) < 1.0)) {
    throw InvalidKernel("AR(1) kernel needs |rho| < 1");
  }
}

Ar1Model::Ar1Model(KernelBuilder builder)
    : rho_(std::numeric_limits<double>::quiet_NaN()),
      builder_(std::move(builder)) {
  if (!builder_) throw InvalidKernel("empty kernel builder");
}

const KernelSpectrum& Ar1Model::spectrum(std::size_t n) const {
  auto it = cache_.find(n);
  if (it == cache_.end()) {
    it = cache_.emplace(n, KernelSpectrum::of(builder_(n))).first;
  }
  return it->second;
}

namespace {

Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

Vector ones(Eigen::Index n) { return Vector::Ones(n); }

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidConfig(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

double gpp_mean(const Vector& y, double rho) {
  if (y.size() == 0) throw InsufficientData("gpp_mean needs n >= 1");
  const Eigen::Index n = y.size();
  const Matrix k = build_ar1(static_cast<std::size_t>(n + 1), rho);
  const Matrix k11 = k.topLeftCorner(n, n);
  const Vector k12 = k.col(n).head(n);
  return k12.dot(spd_solve(identity(n) + k11, y));
}

double gpp_mean(const Vector& y, const Ar1Model& model) {
  if (y.size() == 0) throw InsufficientData("gpp_mean needs n >= 1");
  const Eigen::Index n = y.size();
  const KernelSpectrum& sp = model.spectrum(static_cast<std::size_t>(n));
  const Matrix k = model.kernel(static_cast<std::size_t>(n + 1));
  const Vector k12 = k.col(n).head(n);
  // k12' Q diag(1/lambda) Q' y
  const Vector qy = sp.vectors.transpose() * y;
  const Vector qk = sp.vectors.transpose() * k12;
  return (qk.array() * qy.array() / sp.values.array()).sum();
}

double gpp_var(double rho, std::size_t n, double sigma2) {
  require_positive(sigma2, "sigma2");
  if (n == 0) throw InsufficientData("gpp_var needs n >= 1");
  const auto size = static_cast<Eigen::Index>(n);
  const Matrix k = build_ar1(n + 1, rho);
  const Matrix k11 = k.topLeftCorner(size, size);
  const Vector k12 = k.col(size).head(size);
  const double k22 = k(size, size);
  const double reduction = k12.dot(spd_solve(identity(size) + k11, k12));
  return sigma2 * ((k22 + 1.0) - reduction);
}

namespace {

Moments central_moments(const Vector& white) {
  const Eigen::Index n = white.size();
  const double mean = white.mean();
  const Eigen::ArrayXd dev = white.array() - mean;
  const double denom = static_cast<double>(n - 1);
  return Moments{dev.square().sum() / denom, dev.square().square().sum() / denom};
}

}  // namespace

Moments whiten_moments(const Vector& y, const Matrix& kernel) {
  if (y.size() < 2) throw InsufficientData("whitening needs n >= 2");
  if (kernel.rows() != y.size()) {
    throw InvalidInput("kernel size does not match data");
  }
  const Matrix w = spd_inv_sqrt(identity(y.size()) + kernel);
  return central_moments(w * y);
}

Moments whiten_moments(const Vector& y, const KernelSpectrum& spectrum) {
  if (y.size() < 2) throw InsufficientData("whitening needs n >= 2");
  if (spectrum.size() != y.size()) {
    throw InvalidInput("kernel size does not match data");
  }
  const Vector qy = spectrum.vectors.transpose() * y;
  const Vector scaled = (qy.array() * spectrum.values.array().rsqrt()).matrix();
  return central_moments(spectrum.vectors * scaled);
}

AlphaBeta estimate_alpha_beta(double s2, double s4, bool literal) {
  const double spread = s4 - s2 * s2;
  if (!(spread > 0.0) || !std::isfinite(spread)) {
    throw DegenerateMoments("S4 <= S2^2; moment estimator undefined");
  }
  const double numerator = literal ? s2 : s2 * s2;
  const double alpha = numerator / spread + 2.0;
  return AlphaBeta{alpha, s2 * (alpha + 1.0)};
}

Matrix compute_V(const Matrix& kernel, double delta2) {
  require_positive(delta2, "delta2");
  const Eigen::Index n = kernel.rows();
  const Matrix p = spd_inverse(identity(n) + kernel);
  Matrix v = spd_inverse(p + identity(n) / delta2);
  return 0.5 * (v + v.transpose());
}

double estimate_gamma(const Vector& y, const Matrix& kernel, double delta2) {
  require_positive(delta2, "delta2");
  const Eigen::Index n = y.size();
  if (n == 0 || kernel.rows() != n) {
    throw InvalidInput("kernel size does not match data");
  }
  const Matrix v = compute_V(kernel, delta2);
  const Vector p_y = spd_solve(identity(n) + kernel, y);
  const double num = p_y.dot(v * ones(n));
  const double den = static_cast<double>(n) - ones(n).dot(v * ones(n)) / delta2;
  if (!(std::abs(den) > 1e-14 * static_cast<double>(n))) {
    throw DegenerateBias("bias estimate has a vanishing denominator");
  }
  return num / den;
}

double estimate_gamma(const Vector& y, const KernelSpectrum& spectrum,
                      double delta2) {
  require_positive(delta2, "delta2");
  const Eigen::Index n = y.size();
  if (n == 0 || spectrum.size() != n) {
    throw InvalidInput("kernel size does not match data");
  }
  // In the eigenbasis both numerator and denominator carry the weight
  // delta2 / (lambda + delta2); the common delta2 cancels.
  const Eigen::ArrayXd w = (spectrum.values.array() + delta2).inverse();
  const Eigen::ArrayXd qy = (spectrum.vectors.transpose() * y).array();
  const Eigen::ArrayXd q1 = (spectrum.vectors.transpose() * ones(n)).array();
  const double den = (q1.square() * w).sum();
  if (!(den > 0.0) || !std::isfinite(den)) {
    throw DegenerateBias("bias estimate has a vanishing denominator");
  }
  return (qy * q1 * w).sum() / den;
}

double log_g_delta(const Vector& y, const Matrix& kernel, double gamma,
                   double delta2, double sigma2) {
  require_positive(delta2, "delta2");
  require_positive(sigma2, "sigma2");
  const Eigen::Index n = y.size();
  if (n == 0 || kernel.rows() != n) {
    throw InvalidInput("kernel size does not match data");
  }
  const Matrix p = spd_inverse(identity(n) + kernel);
  const Matrix a = p + identity(n) / delta2;
  const double logdet_a = spd_logdet(a);
  const Vector py = p * y;
  const Vector v_py = spd_solve(a, py);
  const Vector v_one = spd_solve(a, ones(n));
  const double nd = static_cast<double>(n);
  const double quad = py.dot(v_py) + 2.0 * gamma / delta2 * py.dot(v_one) +
                      gamma * gamma / (delta2 * delta2) * v_one.sum() -
                      nd * gamma * gamma / delta2;
  return 0.5 * logdet_a - 0.5 * nd * std::log(delta2) + quad / (2.0 * sigma2);
}

double select_delta(const Vector& y, const Matrix& kernel, double gamma,
                    double sigma2, std::span<const double> grid) {
  if (grid.empty()) throw InvalidConfig("delta grid is empty");
  double best = grid.front();
  double best_value = -std::numeric_limits<double>::infinity();
  for (const double d2 : grid) {
    require_positive(d2, "delta2 grid entry");
    const double value = log_g_delta(y, kernel, gamma, d2, sigma2);
    if (value > best_value) {
      best_value = value;
      best = d2;
    }
  }
  return best;
}

void RbHyper::validate() const {
  require_positive(alpha, "alpha");
  require_positive(beta, "beta");
  require_positive(delta2, "delta2");
  if (!std::isfinite(gamma)) throw InvalidConfig("gamma must be finite");
}

RbComponents rb_components(const Vector& y, double rho, const RbHyper& hyper) {
  return rb_components(y, Ar1Model(rho), hyper);
}

RbComponents rb_components(const Vector& y, const Ar1Model& model,
                           const RbHyper& hyper) {
  hyper.validate();
  const Eigen::Index n = y.size();
  if (n == 0) throw InsufficientData("random-bias predictor needs n >= 1");
  const double d2 = hyper.delta2;
  const double g = hyper.gamma;
  const double nd = static_cast<double>(n);

  const Matrix k1 = model.kernel(static_cast<std::size_t>(n + 1));
  const Matrix kn = k1.topLeftCorner(n, n);

  RbComponents c;

  // Posterior over (a, sigma2) given y^n.
  const Matrix pn = spd_inverse(identity(n) + kn);
  c.V = compute_V(kn, d2);
  c.mu = c.V * (pn * y + (g / d2) * ones(n));
  c.alpha_star = nd + hyper.alpha;
  const Matrix v_inv = pn + identity(n) / d2;
  c.beta_star = hyper.beta + 0.5 * y.dot(pn * y) + 0.5 * g * g * nd / d2 -
                0.5 * c.mu.dot(v_inv * c.mu);

  // Size n+1 quantities.
  const Eigen::Index m = n + 1;
  const Matrix p1 = spd_inverse(identity(m) + k1);
  const Matrix v1 = compute_V(k1, d2);
  Matrix gamma1 = p1 - p1 * v1 * p1;
  c.Gamma1 = 0.5 * (gamma1 + gamma1.transpose());
  c.Gamma2 = (g / d2) * (p1 * (v1 * ones(m)));
  c.Delta = 0.5 * static_cast<double>(m) * g * g / d2 -
            0.5 * g * g / (d2 * d2) * ones(m).dot(v1 * ones(m));

  c.g1 = c.Gamma1.col(n).head(n);
  c.gamma1 = c.Gamma1(n, n);
  c.gamma2 = c.Gamma2(n);
  if (!(c.gamma1 > 0.0)) {
    throw NumericalError("gamma1 is not positive");
  }
  const Matrix gamma1_nn = c.Gamma1.topLeftCorner(n, n);
  const double shift = c.gamma2 - y.dot(c.g1);
  c.A1 = shift / c.gamma1;
  c.A2 = 0.5 * y.dot(gamma1_nn * y) - y.dot(c.Gamma2.head(n)) + c.Delta -
         shift * shift / (2.0 * c.gamma1);
  c.beta_dstar = hyper.beta + c.A2;
  if (!(c.beta_dstar > 0.0)) {
    throw InvalidPosterior("beta** is not positive");
  }
  return c;
}

double rb_predict(const Vector& y, double rho, const RbHyper& hyper) {
  return rb_components(y, rho, hyper).A1;
}

double rb_predict(const Vector& y, const Ar1Model& model,
                  const RbHyper& hyper) {
  hyper.validate();
  const Eigen::Index n = y.size();
  if (n == 0) throw InsufficientData("random-bias predictor needs n >= 1");
  const KernelSpectrum& sp = model.spectrum(static_cast<std::size_t>(n + 1));
  // Gamma1 = Q diag(1/lambda - v/lambda^2) Q' with v = 1/(1/lambda + 1/delta2),
  // which is Q diag(1/(lambda + delta2)) Q'; Gamma2 = gamma * Gamma1 * 1.
  const Eigen::ArrayXd w = (sp.values.array() + hyper.delta2).inverse();
  const Eigen::ArrayXd last = sp.vectors.row(n).transpose().array();
  const Vector col = sp.vectors * (w * last).matrix();
  const double gamma1 = col(n);
  if (!(gamma1 > 0.0)) throw NumericalError("gamma1 is not positive");
  const Eigen::ArrayXd q1 = (sp.vectors.transpose() * ones(n + 1)).array();
  const double gamma2 = hyper.gamma * (last * w * q1).sum();
  return (gamma2 - y.dot(col.head(n))) / gamma1;
}

double StudentT::log_pdf(double x) const {
  const double z = (x - location) * (x - location) / (dof * scale2);
  return std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
         0.5 * std::log(dof * std::numbers::pi * scale2) - 0.5 * (dof + 1.0) * std::log1p(z);
}

double StudentT::pdf(double x) const { return std::exp(log_pdf(x)); }

StudentT rb_predictive(const RbComponents& c, std::size_t n,
                       const RbHyper& hyper) {
  const double dof = 2.0 * hyper.alpha + static_cast<double>(n);
  return StudentT{dof, c.A1, c.beta_dstar / (0.5 * dof) / c.gamma1};
}

double rb_predictive_density(double y_next, const Vector& y, double rho,
                             const RbHyper& hyper) {
  const RbComponents c = rb_components(y, rho, hyper);
  return rb_predictive(c, static_cast<std::size_t>(y.size()), hyper).pdf(y_next);
}

}  // namespace streampred
