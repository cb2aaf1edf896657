#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "zk/domain.hpp"
#include "zk/field.hpp"

namespace zk {

// FFTW-backed transform engine for one domain. Owns plans and scratch buffers, so a
// single instance is not safe for concurrent use; give each worker thread its own.
//
// Conventions (fixed once, everything else derives from them):
//   u_hat(xi_k, l) = dx * sum_j u(x_j) e^{-i xi_k x_j}   per transverse mode, and
//   c_l(x)         = orthonormal sine coefficients, so that
//   sum u^2 dx dy dz = sum_l |c_l|^2 dx = sum_{k,l} |u_hat|^2 / (2X)   exactly.
class Transforms {
 public:
  explicit Transforms(const DomainSpec& dom);
  ~Transforms();
  Transforms(const Transforms&) = delete;
  Transforms& operator=(const Transforms&) = delete;

  const DomainSpec& dom() const { return dom_; }

  void to_spectral(Field& u) const;  // Physical -> Spectral in place
  void to_physical(Field& u) const;  // Spectral -> Physical in place
  Field physical_copy(const Field& u) const;
  Field spectral_copy(const Field& u) const;

  // Multiply by i*xi_k in place (spectral rep). The unpaired Nyquist slot is zeroed,
  // as it must be for an odd-symbol operator acting on real data.
  void derivative_x(Field& u) const;

  // 2/3-rule mask over (k, l1, l2): keep |signed_k| <= Nx/3, l1 <= 2*Ny/3, l2 <= 2*Nz/3.
  std::vector<std::uint8_t> dealias_mask() const;
  void apply_dealias(Field& u) const;  // spectral rep; no-op copy of kept modes

  // Mixed representation: sine coefficients per physical x, mixed[(j*Ny+m)*Nz+n] =
  // c_{m+1,n+1}(x_j). Input must be spectral.
  void to_mixed(const Field& u, std::vector<double>& mixed) const;

  // Gradient components sampled on the collocation grid (inputs spectral, outputs
  // physical). u_y and u_z are cosine series in their own direction and do not vanish
  // on the walls; only interior samples are produced.
  void gradient_physical(const Field& u, Field& ux, Field& uy, Field& uz) const;

  // Cross-section integrals at each x_j, exact for the sine/cosine polynomials the
  // grid represents (equivalently: the collocation trapezoid including wall faces).
  struct LineIntegrals {
    std::vector<double> u2, ux2, uy2, uz2;  // each of size Nx
  };
  LineIntegrals line_integrals(const Field& u) const;  // spectral input

  // Per-x integrals of the squared second-derivative magnitude:
  // h2[j] = sum over all six distinct second partials of their squared cross-section
  // integral at x_j.
  std::vector<double> hessian_line_integrals(const Field& u) const;

 private:
  struct Impl;
  DomainSpec dom_;
  Impl* impl_;
};

}  // namespace zk
