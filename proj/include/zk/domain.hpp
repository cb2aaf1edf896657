#pragma once

#include <cstddef>
#include <vector>

namespace zk {

// Computational domain: x lives on the periodic interval [-X, X) standing in for the
// real line, (y, z) on the rectangle (0, L1) x (0, L2) with homogeneous Dirichlet walls.
//
// Grids:
//   x_j = -X + j * dx,      j = 0..Nx-1,  dx = 2X/Nx
//   y_m = (m+1) * dy,       m = 0..Ny-1,  dy = L1/(Ny+1)   (interior points only)
//   z_n = (n+1) * dz,       n = 0..Nz-1,  dz = L2/(Nz+1)
// Arrays are row major with x slowest and z fastest.
//
// Spectral representation: complex Fourier modes xi_k = pi*k/X in x (signed k in FFT
// order), and the orthonormal Dirichlet sine basis
//   phi_l(y, z) = 2/sqrt(L1*L2) * sin(pi*l1*y/L1) * sin(pi*l2*z/L2),  l1, l2 >= 1,
// in the transverse directions. Transverse array index m corresponds to mode l = m+1.
struct DomainSpec {
  double L1 = 0.0;
  double L2 = 0.0;
  double X = 0.0;
  int Nx = 0;
  int Ny = 0;
  int Nz = 0;
  bool dealias = true;

  // Throws DomainError unless L1, L2, X > 0, Nx even and >= 8, Ny >= 4, Nz >= 4.
  void validate() const;

  double dx() const { return 2.0 * X / Nx; }
  double dy() const { return L1 / (Ny + 1); }
  double dz() const { return L2 / (Nz + 1); }
  double cell() const { return dx() * dy() * dz(); }

  double x(int j) const { return -X + j * dx(); }
  double y(int m) const { return (m + 1) * dy(); }
  double z(int n) const { return (n + 1) * dz(); }

  // Signed integer wavenumber for FFT slot k (0..Nx-1): 0, 1, ..., Nx/2-1, -Nx/2, ..., -1.
  int signed_k(int k) const { return (k < Nx / 2) ? k : k - Nx; }
  double xi(int k) const;
  // Largest |xi| kept by the dealias mask (used by the stability guard).
  double xi_max_dealiased() const;

  std::size_t size() const { return static_cast<std::size_t>(Nx) * Ny * Nz; }
  std::size_t index(int j, int m, int n) const {
    return (static_cast<std::size_t>(j) * Ny + m) * Nz + n;
  }

  bool operator==(const DomainSpec&) const = default;
};

struct TransverseMode {
  int l1 = 0;
  int l2 = 0;
  double lambda = 0.0;
};

// Dirichlet Laplacian eigenvalue pi^2 (l1^2/L1^2 + l2^2/L2^2); requires l1, l2 >= 1.
double eigenvalue(const DomainSpec& dom, int l1, int l2);

// First `count` transverse modes sorted by eigenvalue (ties by l1, then l2).
std::vector<TransverseMode> enumerate_modes(const DomainSpec& dom, int count);

}  // namespace zk
