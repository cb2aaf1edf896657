#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "zk/field.hpp"
#include "zk/gh.hpp"
#include "zk/transforms.hpp"

namespace zk {

struct LinearParams {
  double b = 0.0;
  double delta = 0.0;  // dissipation coefficient in [0, 1]
  void validate() const;
};

// Per-mode evolution symbol s(xi, lambda) = i (xi^3 - b xi + xi lambda) - delta (xi^2 + lambda),
// so that a single mode evolves as exp(s t).
std::complex<double> symbol(double xi, double lambda, const LinearParams& p);

// u <- exp(t L) u, exact per mode (spectral rep, in place). At the unpaired Nyquist
// slot only the damping part of the symbol is applied. Requires t >= 0.
void propagate(const Transforms& tr, Field& u, double t, const LinearParams& p);

// Forcing sampler: returns the forcing field at a given time (either rep).
using TimeField = std::function<Field(double)>;

// Duhamel solution of the forced linear problem,
//   u(t) = e^{tL} u0 + int_0^t e^{(t-tau)L} f(tau) dtau,
// with the integral evaluated by nq-point Gauss-Legendre quadrature on [0, t].
// `u` holds u0 on entry (spectral) and the solution on exit.
void duhamel_apply(const Transforms& tr, Field& u, double t, const LinearParams& p,
                   const TimeField& forcing, int nq = 8);

// Picard iteration for the nonlinear problem on [0, t]: v_{k+1} solves the linear
// problem with forcing f - d/dx g_h(v_k), each solve by Duhamel quadrature; iterates
// are stored at the quadrature nodes and interpolated (barycentric) in between.
// gh == nullptr means g = 0 (then one iterate reproduces duhamel_apply exactly);
// forcing == nullptr means f = 0. Requires delta > 0 and t > 0.
struct PicardResult {
  Field final;                // spectral state at time t
  std::vector<double> diffs;  // sup-over-nodes L2 distance of successive iterates
};
PicardResult picard_iterate(const Transforms& tr, const Field& u0, double t,
                            const LinearParams& p, const GhFunction* gh,
                            const TimeField* forcing, int n_iter, int nq = 8);

}  // namespace zk
