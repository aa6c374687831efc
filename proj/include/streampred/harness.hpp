#ifndef STREAMPRED_HARNESS_HPP
#define STREAMPRED_HARNESS_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "streampred/execution.hpp"
#include "streampred/gp_predict.hpp"
#include "streampred/kmeans_stream.hpp"

namespace streampred {

enum class Method { hbp_mean, hbp_median, shtarkov, dpp, gpp_rb, gpp_norb };
enum class Mode { one_pass, representative };
enum class HyperPolicy { refit, freeze };
enum class DeltaPolicy { fixed, grid };

inline constexpr std::array<Method, 6> kAllMethods{
    Method::hbp_mean, Method::hbp_median, Method::shtarkov,
    Method::dpp,      Method::gpp_rb,     Method::gpp_norb};
inline constexpr std::array<Method, 4> kOnePassMethods{
    Method::hbp_mean, Method::hbp_median, Method::shtarkov, Method::dpp};

std::string_view to_string(Method m);
std::string_view to_string(Mode m);
std::optional<Method> parse_method(std::string_view name);
bool supports(Method m, Mode mode);

// Sketch range (lo, hi]. By default it is taken from the burn-in min/max
// widened by `expand` of the span on each side; `fixed` pins it.
struct RangePolicy {
  bool fixed = false;
  double lo = 0.0;
  double hi = 1.0;
  double expand = 0.05;
};

struct ExperimentConfig {
  double burnin_frac = 0.1;
  // Overrides burnin_frac when set (prefix replays keep the burn-in fixed).
  std::optional<std::size_t> burnin_count;
  std::size_t bins = 100;   // K
  std::size_t depth = 10;   // d
  std::size_t width = 50;   // W
  double rho = 0.8;
  double delta = 0.1;       // bias scale delta; the prior variance ratio is delta^2
  DeltaPolicy delta_policy = DeltaPolicy::fixed;
  std::size_t kmeans_k = 200;
  double dpp_mass = 1.0;
  std::uint64_t seed = 42;
  int precision = 6;        // decimal places for DP tie detection
  RangePolicy range;
  HyperPolicy hyper = HyperPolicy::refit;
  CenterOrder center_order = CenterOrder::slot;
  bool literal_alpha = false;

  void validate() const;
  double delta2() const { return delta * delta; }
  std::size_t burnin_for(std::size_t n_total) const;
};

// Running L1 error. mean follows CPE(n+1) = (n CPE(n) + |e|) / (n+1).
struct CpeLedger {
  std::size_t n = 0;
  double cpe_mean = 0.0;
  double cpe_sum = 0.0;
};

CpeLedger cpe_update(CpeLedger ledger, double y_true, double y_pred);

// Observe-one / predict-next interface shared by all six methods.
class PredictorHandle {
 public:
  // Builds the predictor and feeds it the burn-in. Throws InvalidConfig for
  // a method/mode pair that is not supported (GP methods are
  // representative-only).
  PredictorHandle(Method method, Mode mode, const ExperimentConfig& config,
                  std::span<const double> burnin);
  ~PredictorHandle();
  PredictorHandle(PredictorHandle&&) noexcept;
  PredictorHandle& operator=(PredictorHandle&&) noexcept;

  double predict();
  void observe(double y);

  Method method() const { return method_; }
  Mode mode() const { return mode_; }
  // Values that fell outside the sketch range (HBP only).
  std::uint64_t clamped() const;
  // Steps where a GP computation failed and the snapshot mean was used.
  std::uint64_t fallbacks() const;

 private:
  struct State;
  Method method_;
  Mode mode_;
  std::unique_ptr<State> state_;
};

struct StepRecord {
  std::size_t index = 0;  // 1-based position in the stream
  double y = 0.0;
  double prediction = 0.0;
};

struct MethodResult {
  Method method = Method::shtarkov;
  Mode mode = Mode::one_pass;
  std::size_t n_total = 0;
  std::size_t n_scored = 0;
  CpeLedger ledger;
  std::uint64_t clamped = 0;
  std::uint64_t fallbacks = 0;
  std::vector<StepRecord> trace;  // filled only when requested
};

struct RunOptions {
  Execution exec = Execution::parallel;
  bool keep_trace = false;
};

// Prequential loop: burn-in is observed but not scored; afterwards each
// value is predicted from the past, scored, then observed. Methods run on
// independent state and are fanned out across threads in parallel mode.
std::vector<MethodResult> run_one_pass(std::span<const double> stream,
                                       std::span<const Method> methods,
                                       const ExperimentConfig& config,
                                       RunOptions options = {});

// Same loop, but every prediction is rebuilt from the current streaming
// K-means centers alone.
std::vector<MethodResult> run_representative(std::span<const double> stream,
                                             std::span<const Method> methods,
                                             const ExperimentConfig& config,
                                             RunOptions options = {});

// Random-bias hyperparameters for one snapshot: alpha/beta by moments of
// the whitened data (alpha = 3, beta = 2 S2 when the moments degenerate),
// gamma in closed form (0 when degenerate), delta^2 fixed or chosen on the
// default grid.
RbHyper fit_rb_hyper(const Vector& y, const Ar1Model& model,
                     const ExperimentConfig& config);

// Four contiguous segments; earlier segments take the remainder.
std::vector<std::vector<double>> quarter_split(std::span<const double> stream);

}  // namespace streampred

#endif  // STREAMPRED_HARNESS_HPP
