#pragma once

#include <array>
#include <vector>

#include "zk/field.hpp"
#include "zk/transforms.hpp"

namespace zk {

// Smooth cutoff: 0 for x <= 0, 1 for x >= 1, strictly increasing between, built from
// phi(x) = exp(-1/x) as eta = phi(x) / (phi(x) + phi(1-x)), so eta(x) + eta(1-x) = 1.
double eta(double x);

enum class WeightKind { One, Exp2Alpha, RhoAlpha, KappaAlphaBeta };

struct WeightSpec {
  WeightKind kind = WeightKind::One;
  double alpha = 0.0;       // in [0, 1]
  double beta = 1.0;        // in (0, 1], KappaAlphaBeta only
  bool derivative = false;  // evaluate psi' of the named weight as the weight itself
  void validate() const;    // throws DomainError
};

// Evaluator for one admissible weight.
//
// KappaAlphaBeta: e^{2 beta x} for x <= -1; (1+x)^{2 alpha} (alpha > 0) or
// 2 - (1+x)^{-1/2} (alpha = 0) for x >= 0. RhoAlpha is identically 1 + kappa_{alpha,1}.
// Exp2Alpha is e^{2 alpha x}; One is the constant 1.
//
// The gap (-1, 0) is bridged C2 by the quintic Hermite interpolant of the outer
// values and first two derivatives. Where that unique quintic is not increasing
// (small beta against large alpha), the derivative is bridged instead as
// exp(quartic Hermite of log psi' data) with its free coefficient solved so the
// integral matches the value gap; this keeps psi' > 0 structurally and stays C2.
class Weight {
 public:
  explicit Weight(const WeightSpec& spec);

  const WeightSpec& spec() const { return spec_; }
  double value(double x) const;  // psi(x), or psi'(x) when spec.derivative is set
  double d1(double x) const;     // psi'
  double d2(double x) const;
  // psi''': analytic kinds only (One, Exp2Alpha everywhere; RhoAlpha/Kappa off-bridge).
  double d3(double x) const;

 private:
  double base_value(double x) const;
  double base_d1(double x) const;
  double base_d2(double x) const;

  WeightSpec spec_;
  bool bridged_ = false;        // RhoAlpha / KappaAlphaBeta only
  bool quintic_ = true;         // bridge flavor
  std::array<double, 6> poly_{};  // quintic coefficients in t = x + 1
  std::array<double, 4> logq_{};  // cubic Hermite part of log psi' on the bridge
  double bump_ = 0.0;             // coefficient of t^2 (1-t)^2 in log psi'
  double fleft_ = 0.0;            // psi(-1)
  double rho_shift_ = 0.0;        // 1 for RhoAlpha, 0 otherwise
};

// sup of psi'/psi over `samples` equispaced points of [lo, hi].
double admissibility_ratio(const Weight& w, double lo, double hi, int samples);

// Riemann sums of u^2 psi(x) over the collocation grid (physical rep). The windowed
// form restricts to grid points with x_j <= xmax (exponential weights are only
// meaningful away from the torus seam).
double weighted_l2_norm(const Field& u, const Weight& w);
double weighted_l2_norm_window(const Field& u, const Weight& w, double xmax);

// sqrt( sum_j psi(x_j) dx * (ux2+uy2+uz2)[j] ) from exact cross-section integrals;
// input spectral.
double weighted_h1_seminorm(const Transforms& tr, const Field& u, const Weight& w);
double weighted_h1_seminorm_window(const Transforms& tr, const Field& u, const Weight& w,
                                   double xmax);

// Local-smoothing functional: given snapshot times and per-snapshot cross-section
// gradient integrals D_j(t) = integral of |Du|^2 over the section at x_j, integrate
// trapezoidally in time and return the largest unit-x-window sum
//   max_j sum_{i=0}^{W-1} TD_{(j+i) mod Nx} dx,   W = ceil(1/dx).
double local_smoothing_lambda(const DomainSpec& dom, const std::vector<double>& times,
                              const std::vector<std::vector<double>>& grad2_lines);

}  // namespace zk
