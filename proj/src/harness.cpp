#include "streampred/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#include "streampred/baselines.hpp"
#include "streampred/cms_histogram.hpp"
#include "streampred/errors.hpp"
#include "streampred/hbp.hpp"
#include "streampred/seeding.hpp"

namespace streampred {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::hbp_mean: return "hbp_mean";
    case Method::hbp_median: return "hbp_median";
    case Method::shtarkov: return "shtarkov";
    case Method::dpp: return "dpp";
    case Method::gpp_rb: return "gpp_rb";
    case Method::gpp_norb: return "gpp_norb";
  }
  return "unknown";
}

std::string_view to_string(Mode m) {
  return m == Mode::one_pass ? "one_pass" : "representative";
}

std::optional<Method> parse_method(std::string_view name) {
  for (const Method m : kAllMethods) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

bool supports(Method m, Mode mode) {
  if (mode == Mode::representative) return true;
  return m != Method::gpp_rb && m != Method::gpp_norb;
}

void ExperimentConfig::validate() const {
  if (!burnin_count && !(burnin_frac > 0.0 && burnin_frac < 1.0)) {
    throw InvalidConfig("burn-in fraction must lie in (0, 1)");
  }
  if (bins == 0 || depth == 0 || width == 0) {
    throw InvalidConfig("sketch dimensions must be positive");
  }
  if (!(std::abs(rho) < 1.0)) throw InvalidConfig("|rho| must be < 1");
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw InvalidConfig("delta must be positive");
  }
  if (kmeans_k == 0) throw InvalidConfig("k-means capacity must be positive");
  if (!(dpp_mass > 0.0) || !std::isfinite(dpp_mass)) {
    throw InvalidConfig("DP mass must be positive");
  }
  if (precision < 0 || precision > 12) {
    throw InvalidConfig("precision must be in 0..12");
  }
  if (range.fixed && !(range.hi > range.lo)) {
    throw InvalidConfig("fixed range needs hi > lo");
  }
  if (!(range.expand >= 0.0)) throw InvalidConfig("range expansion must be >= 0");
}

std::size_t ExperimentConfig::burnin_for(std::size_t n_total) const {
  if (burnin_count) return std::min(*burnin_count, n_total);
  // The small offset keeps products like 0.1 * 5000 from rounding up.
  const double raw = burnin_frac * static_cast<double>(n_total);
  return std::min(n_total, static_cast<std::size_t>(std::ceil(raw - 1e-9)));
}

CpeLedger cpe_update(CpeLedger ledger, double y_true, double y_pred) {
  if (!std::isfinite(y_true) || !std::isfinite(y_pred)) {
    throw InvalidInput("non-finite value scored");
  }
  const double err = std::abs(y_true - y_pred);
  const double n = static_cast<double>(ledger.n);
  ledger.cpe_mean = (n * ledger.cpe_mean + err) / (n + 1.0);
  ledger.cpe_sum += err;
  ++ledger.n;
  return ledger;
}

namespace {

IntervalPartition sketch_range(std::span<const double> burnin,
                               const ExperimentConfig& cfg) {
  if (cfg.range.fixed) {
    return IntervalPartition(cfg.range.lo, cfg.range.hi, cfg.bins);
  }
  if (burnin.empty()) {
    throw InvalidConfig("sketch range needs a non-empty burn-in or a fixed range");
  }
  const auto [mn, mx] = std::minmax_element(burnin.begin(), burnin.end());
  const double lo = *mn;
  const double hi = *mx;
  const double span = hi - lo;
  if (span > 0.0) {
    return IntervalPartition(lo - cfg.range.expand * span,
                             hi + cfg.range.expand * span, cfg.bins);
  }
  // Constant burn-in: center the value on the midpoint of the middle bin.
  const double h = 0.1 * std::max(std::abs(lo), 1.0) /
                   static_cast<double>(cfg.bins);
  const double mid = static_cast<double>((cfg.bins + 1) / 2);
  const double start = lo - (mid - 0.5) * h;
  return IntervalPartition(start, start + h * static_cast<double>(cfg.bins),
                           cfg.bins);
}

double snapshot_mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

RbHyper fit_rb_hyper(const Vector& y, const Ar1Model& model,
                     const ExperimentConfig& config) {
  RbHyper h;
  const std::size_t n = static_cast<std::size_t>(y.size());
  double s2 = 0.0;
  try {
    const Moments mom = whiten_moments(y, model.spectrum(n));
    s2 = mom.s2;
    const AlphaBeta ab =
        estimate_alpha_beta(mom.s2, mom.s4, config.literal_alpha);
    h.alpha = ab.alpha;
    h.beta = ab.beta;
  } catch (const DegenerateMoments&) {
    h.alpha = 3.0;
    h.beta = 2.0 * s2;
  } catch (const InsufficientData&) {
    h.alpha = 3.0;
    h.beta = 2.0 * s2;
  }
  h.sigma2_hat = std::max(s2, 1e-12);
  h.beta = std::max(h.beta, 1e-12);

  h.delta2 = config.delta2();
  auto gamma_at = [&](double d2) {
    try {
      return estimate_gamma(y, model.spectrum(n), d2);
    } catch (const DegenerateBias&) {
      return 0.0;
    }
  };
  h.gamma = gamma_at(h.delta2);
  if (config.delta_policy == DeltaPolicy::grid) {
    try {
      h.delta2 = select_delta(y, model.kernel(n), h.gamma, h.sigma2_hat,
                              kDefaultDelta2Grid);
    } catch (const Error&) {
      h.delta2 = 0.01;
    }
    h.gamma = gamma_at(h.delta2);
  }
  return h;
}

struct PredictorHandle::State {
  ExperimentConfig cfg;
  std::optional<CmsHistogram> sketch;
  ShtarkovState shtarkov;
  std::optional<DppState> dpp;
  std::optional<StreamKMeans> kmeans;
  std::optional<Ar1Model> model;
  std::optional<RbHyper> frozen;
  std::uint64_t fallbacks = 0;
};

PredictorHandle::PredictorHandle(Method method, Mode mode,
                                 const ExperimentConfig& config,
                                 std::span<const double> burnin)
    : method_(method), mode_(mode), state_(std::make_unique<State>()) {
  config.validate();
  if (!supports(method, mode)) {
    throw InvalidConfig(std::string(to_string(method)) +
                        " only runs in representative mode");
  }
  State& s = *state_;
  s.cfg = config;
  const std::string component(to_string(method));
  if (method == Method::hbp_mean || method == Method::hbp_median) {
    s.sketch = CmsHistogram::with_seed(sketch_range(burnin, config),
                                       config.depth, config.width,
                                       derive_seed(config.seed, component));
  }
  if (mode == Mode::representative) {
    s.kmeans.emplace(config.kmeans_k);
    if (method == Method::gpp_rb || method == Method::gpp_norb) {
      s.model.emplace(config.rho);
    }
  } else if (method == Method::dpp) {
    s.dpp.emplace(config.dpp_mass, config.precision);
  }
  for (const double y : burnin) observe(y);
}

PredictorHandle::~PredictorHandle() = default;
PredictorHandle::PredictorHandle(PredictorHandle&&) noexcept = default;
PredictorHandle& PredictorHandle::operator=(PredictorHandle&&) noexcept = default;

void PredictorHandle::observe(double y) {
  State& s = *state_;
  if (mode_ == Mode::representative) {
    s.kmeans->observe(y);
    return;
  }
  switch (method_) {
    case Method::hbp_mean:
    case Method::hbp_median: s.sketch->update(y); break;
    case Method::shtarkov: s.shtarkov.observe(y); break;
    case Method::dpp: s.dpp->observe(y); break;
    default: break;
  }
}

double PredictorHandle::predict() {
  State& s = *state_;
  if (mode_ == Mode::one_pass) {
    switch (method_) {
      case Method::hbp_mean: return predict_mean(*s.sketch);
      case Method::hbp_median: return predict_median(*s.sketch);
      case Method::shtarkov: return s.shtarkov.predict();
      case Method::dpp: return s.dpp->predict();
      default: break;
    }
    throw InvalidConfig("method does not support one-pass mode");
  }

  const std::vector<double> snap = s.kmeans->centers(s.cfg.center_order);
  if (snap.empty()) throw ColdStart("no cluster centers yet");
  switch (method_) {
    case Method::hbp_mean:
    case Method::hbp_median:
      s.sketch->clear();
      for (const double v : snap) s.sketch->update(v);
      return streampred::predict(*s.sketch, method_ == Method::hbp_mean ? HbpVariant::mean
                                                            : HbpVariant::median);
    case Method::shtarkov: return shtarkov_predict_from(snap);
    case Method::dpp: return dpp_predict_from(snap, s.cfg.dpp_mass, s.cfg.precision);
    case Method::gpp_norb:
    case Method::gpp_rb: {
      const Vector y = Eigen::Map<const Vector>(snap.data(),
                                                static_cast<Eigen::Index>(snap.size()));
      try {
        if (method_ == Method::gpp_norb) return gpp_mean(y, *s.model);
        if (s.cfg.hyper == HyperPolicy::freeze) {
          if (!s.frozen) s.frozen = fit_rb_hyper(y, *s.model, s.cfg);
          return rb_predict(y, *s.model, *s.frozen);
        }
        return rb_predict(y, *s.model, fit_rb_hyper(y, *s.model, s.cfg));
      } catch (const Error&) {
        ++s.fallbacks;
        return snapshot_mean(snap);
      }
    }
  }
  throw InvalidConfig("unknown method");
}

std::uint64_t PredictorHandle::clamped() const {
  return state_->sketch ? state_->sketch->clamped() : 0;
}

std::uint64_t PredictorHandle::fallbacks() const { return state_->fallbacks; }

namespace {

MethodResult run_method(std::span<const double> stream, Method method,
                        Mode mode, const ExperimentConfig& cfg,
                        bool keep_trace) {
  const std::size_t burn = cfg.burnin_for(stream.size());
  PredictorHandle handle(method, mode, cfg, stream.first(burn));
  MethodResult r;
  r.method = method;
  r.mode = mode;
  r.n_total = stream.size();
  if (keep_trace) r.trace.reserve(stream.size() - burn);
  for (std::size_t i = burn; i < stream.size(); ++i) {
    const double p = handle.predict();
    r.ledger = cpe_update(r.ledger, stream[i], p);
    if (keep_trace) r.trace.push_back(StepRecord{i + 1, stream[i], p});
    handle.observe(stream[i]);
  }
  r.n_scored = r.ledger.n;
  r.clamped = handle.clamped();
  r.fallbacks = handle.fallbacks();
  return r;
}

std::vector<MethodResult> run_all(std::span<const double> stream,
                                  std::span<const Method> methods, Mode mode,
                                  const ExperimentConfig& cfg,
                                  RunOptions options) {
  cfg.validate();
  if (stream.empty()) throw IngestionError("empty stream");
  for (const Method m : methods) {
    if (!supports(m, mode)) {
      throw InvalidConfig(std::string(to_string(m)) +
                          " only runs in representative mode");
    }
  }
  std::vector<MethodResult> results(methods.size());
  std::vector<std::exception_ptr> errors(methods.size());
  const auto count = static_cast<std::ptrdiff_t>(methods.size());
  const bool parallel = options.exec == Execution::parallel;
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      results[i] = run_method(stream, methods[i], mode, cfg, options.keep_trace);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace

std::vector<MethodResult> run_one_pass(std::span<const double> stream,
                                       std::span<const Method> methods,
                                       const ExperimentConfig& config,
                                       RunOptions options) {
  return run_all(stream, methods, Mode::one_pass, config, options);
}

std::vector<MethodResult> run_representative(std::span<const double> stream,
                                             std::span<const Method> methods,
                                             const ExperimentConfig& config,
                                             RunOptions options) {
  return run_all(stream, methods, Mode::representative, config, options);
}

std::vector<std::vector<double>> quarter_split(std::span<const double> stream) {
  if (stream.size() < 4) throw IngestionError("need at least 4 values to split");
  const std::size_t base = stream.size() / 4;
  const std::size_t extra = stream.size() % 4;
  std::vector<std::vector<double>> parts;
  std::size_t offset = 0;
  for (std::size_t q = 0; q < 4; ++q) {
    const std::size_t len = base + (q < extra ? 1 : 0);
    const auto seg = stream.subspan(offset, len);
    parts.emplace_back(seg.begin(), seg.end());
    offset += len;
  }
  return parts;
}

}  // namespace streampred
