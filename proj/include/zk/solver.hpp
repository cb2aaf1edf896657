#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "zk/field.hpp"
#include "zk/gh.hpp"
#include "zk/linear.hpp"
#include "zk/transforms.hpp"
#include "zk/weights.hpp"

namespace zk {

// Auto: g_h for h > 0, plain u^2/2 for h = 0. Off: linear equation. Quadratic: exact
// u^2/2 regardless of h, so h acts through the diffusion term only (the control case
// for checking that an inactive truncation changes nothing).
enum class Nonlinearity { Auto, Off, Quadratic };

struct SolverConfig {
  double b = 0.0;
  double h = 0.0;  // regularization strength: diffusion delta = h, truncation g_h
  Nonlinearity nonlinearity = Nonlinearity::Auto;
  double dt = 1e-3;
  double T = 1.0;
  int snapshot_stride = 10;   // metrics recording stride, in steps
  bool picard_check = false;  // Picard cross-check of the first step (needs h > 0)

  void validate() const;  // throws DomainError
  LinearParams linear() const { return {b, h}; }
  bool nonlinear_active() const { return nonlinearity != Nonlinearity::Off; }
  long steps() const;
};

// Separable smooth forcing f(t,x,y,z) = amp(t) * F0(x,y,z), sampled at stage times.
struct Forcing {
  Field profile;                      // spectral
  std::function<double(double)> amp;  // smooth scalar modulation
};

struct DiagnosticsConfig {
  WeightSpec weight{};               // weighted_l2 column; One means plain L2
  std::optional<double> window_max;  // restrict weighted sums to x_j <= window_max
  double guard_threshold = 1e-10;    // seam magnitudes above this flag truncation
  bool weighted_identity = false;    // accumulate the e^{2 alpha x} identity terms
  bool track_gradient_lines = false; // store per-record cross-section |Du|^2 profiles
};

struct MetricRecord {
  double t = 0.0;
  double l2 = 0.0;
  double energy = 0.0;
  double weighted_l2 = 0.0;
  double max_abs = 0.0;
  double seam_magnitude = 0.0;
  double res_l2 = 0.0;
  double res_weighted = 0.0;  // NaN when the weighted identity is not tracked
};

struct PicardCheck {
  std::vector<double> diffs;  // successive-iterate sup distances
  double vs_step = 0.0;       // L2 distance of the Picard endpoint to the RK4 step
};

struct RunResult {
  std::vector<MetricRecord> records;
  double t_final = 0.0;
  long step_count = 0;
  bool truncation_warning = false;
  std::optional<PicardCheck> picard;
  std::vector<std::vector<double>> grad_lines;  // per record, when tracked
  double h = 0.0;                               // echoed from the config
  double b = 0.0;
  bool had_forcing = false;
  bool weighted_identity = false;
};

// One integrating-factor RK4 stepper bound to a transform engine. The linear symbol
// is applied through exact exponentials (half- and full-step factor tables); only the
// nonlinear term -d/dx g(u) + f is treated by the explicit stages. With the
// nonlinearity off a step is a single exact propagation.
class Stepper {
 public:
  Stepper(const Transforms& tr, const SolverConfig& cfg, const Forcing* forcing);

  void step(Field& u, double t);
  // max |u| over the grid seen by the first stage of the latest step (the state the
  // step started from); NaN-propagating, 0 until the first nonlinear step.
  double stage_max() const { return stage_max_; }
  const GhFunction* gh() const { return gh_ ? &*gh_ : nullptr; }

 private:
  void rhs(const Field& v, double t, Field& out, bool collect_max);
  const Transforms& tr_;
  SolverConfig cfg_;
  const Forcing* forcing_;
  std::optional<GhFunction> gh_;
  std::vector<std::complex<double>> e_half_, e_full_;
  Field k1_, k2_, k3_, k4_, u1_;
  double stage_max_ = 0.0;
};

using RecordHook = std::function<void(double t, const Field& u_spec)>;

// Integrate u0 to T, recording metrics every snapshot_stride steps (plus t = 0 and
// the final step). u0 may be in either representation; it is dealias-masked on entry
// when the domain says so. Identity accumulators run trapezoidally at every step.
RunResult run(const Transforms& tr, Field u0, const SolverConfig& cfg,
              const Forcing* forcing = nullptr, const DiagnosticsConfig& diag = {},
              const RecordHook& hook = {});

}  // namespace zk
