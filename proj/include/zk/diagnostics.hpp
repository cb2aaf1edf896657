#pragma once

#include <cstdint>
#include <vector>

#include "zk/field.hpp"
#include "zk/rng.hpp"
#include "zk/solver.hpp"
#include "zk/transforms.hpp"
#include "zk/weights.hpp"

namespace zk {

// Drift of the two conserved functionals over an unforced run.
struct ConservationReport {
  double l2_drift = 0.0;      // max_t |‖u(t)‖² - ‖u0‖²| / ‖u0‖²
  double energy_drift = 0.0;  // max_t |E(t) - E(0)| / max(|E(0)|, eps)
  double e0 = 0.0;
};
ConservationReport conservation_report(const RunResult& run);

// Minimum transverse Rayleigh quotient and the cruder cross-section bound.
struct FriedrichsReport {
  double min_rayleigh = 0.0;   // pi^2 (1/L1^2 + 1/L2^2)
  double remark_bound = 0.0;   // min(L1, L2) / pi, valid but weaker
};
FriedrichsReport friedrichs_min_rayleigh(const DomainSpec& dom);

// Rayleigh quotient of an arbitrary field, for spot checks against the minimum.
double rayleigh_quotient(const Transforms& tr, const Field& u);

// Predicted exponential rate for the weighted norm squared under the linear flow.
struct DecayPrediction {
  double alpha = 0.0;
  double lambda11 = 0.0;
  double b = 0.0;
  double rate = 0.0;  // 2 alpha (lambda11 - b - 4 alpha^2)
};
DecayPrediction decay_prediction(const DomainSpec& dom, double alpha, double b);

struct DecayReport {
  std::vector<double> times;
  std::vector<double> norms;   // windowed weighted L2 norm at record times
  double fitted_rate = 0.0;    // r in norms^2 ~ C exp(-r t), least squares
  bool nonincreasing = false;
  bool rate_defined = false;   // false when the series is too small to fit
  bool valid = false;          // guard band stayed quiet for the whole run
  DecayPrediction prediction;
  RunResult run;
};
DecayReport decay_experiment(const Transforms& tr, Field u0, const SolverConfig& cfg,
                             double alpha, double window_max,
                             double guard_threshold = 1e-10);

// Weighted Gagliardo-Nirenberg ratio for one field. c = 1 throughout, so the
// audit reports the raw LHS/RHS quotient.
struct InterpSpec {
  int k = 1;
  int m = 0;
  double q = 2.0;
  WeightSpec w1{};
  WeightSpec w2{};
};
struct InterpResult {
  double ratio = 0.0;
  double exponent = 0.0;  // s = (2m+3)/(4k) - 3/(2kq)
  bool degenerate = false;
};
InterpResult interpolation_ratio(const Transforms& tr, const Field& phi, const InterpSpec& spec);

// Band-limited random field, unit L2 norm, reproducible from the seed.
Field random_band_limited(const Transforms& tr, int kband, int l1band, int l2band,
                          std::uint64_t seed);

struct InterpolationAudit {
  std::vector<double> ratios;  // one per sampled field
  double max_ratio = 0.0;
  int degenerate_count = 0;
};
InterpolationAudit interpolation_audit(const Transforms& tr, const InterpSpec& spec,
                                       int n_fields, std::uint64_t seed);

// Closed identities evaluated from run records. Each returns the largest
// relative residual over the recorded times.
enum class IdentityKind {
  MassBalance,       // L2 identity of the limit problem, h = 0
  RegularizedMass,   // L2 identity with the 2h dissipation term, h > 0
  WeightedExp,       // exponential-weight identity, needs tracking enabled
};
double identity_residual(const RunResult& run, IdentityKind kind);

// Local smoothing functional of a finished run (needs gradient line tracking).
double local_smoothing_of_run(const DomainSpec& dom, const RunResult& run);

// Continuous dependence: one base trajectory, a ladder of perturbation sizes.
struct ContinuousDependenceReport {
  std::vector<double> eps;
  std::vector<double> ratios;      // sup_t ||u - u~||_w / (eps ||p||_w)
  bool exact_match = false;        // set when an eps of zero was requested
  RunResult base;                  // unperturbed trajectory metrics
};
ContinuousDependenceReport continuous_dependence(const Transforms& tr, const Field& u0,
                                                 const Field& perturbation,
                                                 const std::vector<double>& eps_ladder,
                                                 const SolverConfig& cfg,
                                                 const WeightSpec& wspec);

// Observed temporal convergence order against a fine-step reference solution.
struct OrderReport {
  std::vector<double> dts;
  std::vector<double> errors;  // L2 distance to the reference at t = T
  double slope = 0.0;          // least-squares slope of log(err) vs log(dt)
};
OrderReport temporal_order(const Transforms& tr, const Field& u0, SolverConfig cfg,
                           std::vector<double> dts, double dt_ref);

}  // namespace zk
