#include "zk/transforms.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <mutex>
#include <numbers>

#include "zk/errors.hpp"

namespace zk {

namespace {
// The FFTW planner is not thread-safe; executing distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Field make_physical_field(const DomainSpec& dom) {
  Field f;
  f.dom = dom;
  f.rep = Rep::Physical;
  f.phys.assign(dom.size(), 0.0);
  return f;
}

Field make_spectral_field(const DomainSpec& dom) {
  Field f;
  f.dom = dom;
  f.rep = Rep::Spectral;
  f.spec.assign(dom.size(), {0.0, 0.0});
  return f;
}

double l2_norm(const Field& u) {
  double s = 0.0;
  if (u.rep == Rep::Physical) {
    for (double v : u.phys) s += v * v;
    return std::sqrt(s * u.dom.cell());
  }
  for (const auto& v : u.spec) s += std::norm(v);
  return std::sqrt(s / (2.0 * u.dom.X));
}

double max_abs(const Field& u) {
  if (u.rep != Rep::Physical) throw UsageError("max_abs: field must be in physical rep");
  double m = 0.0;
  for (double v : u.phys) m = std::max(m, std::abs(v));
  return m;
}

struct Transforms::Impl {
  double* r = nullptr;        // Nx*Ny*Nz real scratch
  fftw_complex* c = nullptr;  // Nx*Ny*Nz complex scratch
  double* py = nullptr;       // Nx*(Ny+2)*Nz padded-y scratch (cosine sampling)
  double* pz = nullptr;       // Nx*Ny*(Nz+2) padded-z scratch
  fftw_plan dst_y = nullptr, dst_z = nullptr;
  fftw_plan fft_fwd = nullptr, fft_bwd = nullptr;
  fftw_plan dct_y = nullptr, dct_z = nullptr;
};

Transforms::Transforms(const DomainSpec& dom) : dom_(dom) {
  dom_.validate();
  impl_ = new Impl;
  const int Nx = dom.Nx, Ny = dom.Ny, Nz = dom.Nz;
  const std::size_t N = dom.size();

  std::lock_guard<std::mutex> lock(planner_mutex());
  impl_->r = fftw_alloc_real(N);
  impl_->c = fftw_alloc_complex(N);
  impl_->py = fftw_alloc_real(static_cast<std::size_t>(Nx) * (Ny + 2) * Nz);
  impl_->pz = fftw_alloc_real(static_cast<std::size_t>(Nx) * Ny * (Nz + 2));

  const unsigned flags = FFTW_ESTIMATE;
  {
    fftw_iodim dim{Ny, Nz, Nz};
    fftw_iodim loops[2] = {{Nx, Ny * Nz, Ny * Nz}, {Nz, 1, 1}};
    fftw_r2r_kind kind = FFTW_RODFT00;
    impl_->dst_y = fftw_plan_guru_r2r(1, &dim, 2, loops, impl_->r, impl_->r, &kind, flags);
  }
  {
    fftw_iodim dim{Nz, 1, 1};
    fftw_iodim loops[1] = {{Nx * Ny, Nz, Nz}};
    fftw_r2r_kind kind = FFTW_RODFT00;
    impl_->dst_z = fftw_plan_guru_r2r(1, &dim, 1, loops, impl_->r, impl_->r, &kind, flags);
  }
  impl_->fft_fwd = fftw_plan_many_dft(1, &Nx, Ny * Nz, impl_->c, nullptr, Ny * Nz, 1, impl_->c,
                                      nullptr, Ny * Nz, 1, FFTW_FORWARD, flags);
  impl_->fft_bwd = fftw_plan_many_dft(1, &Nx, Ny * Nz, impl_->c, nullptr, Ny * Nz, 1, impl_->c,
                                      nullptr, Ny * Nz, 1, FFTW_BACKWARD, flags);
  {
    fftw_iodim dim{Ny + 2, Nz, Nz};
    fftw_iodim loops[2] = {{Nx, (Ny + 2) * Nz, (Ny + 2) * Nz}, {Nz, 1, 1}};
    fftw_r2r_kind kind = FFTW_REDFT00;
    impl_->dct_y = fftw_plan_guru_r2r(1, &dim, 2, loops, impl_->py, impl_->py, &kind, flags);
  }
  {
    fftw_iodim dim{Nz + 2, 1, 1};
    fftw_iodim loops[1] = {{Nx * Ny, Nz + 2, Nz + 2}};
    fftw_r2r_kind kind = FFTW_REDFT00;
    impl_->dct_z = fftw_plan_guru_r2r(1, &dim, 1, loops, impl_->pz, impl_->pz, &kind, flags);
  }
  if (!impl_->dst_y || !impl_->dst_z || !impl_->fft_fwd || !impl_->fft_bwd || !impl_->dct_y ||
      !impl_->dct_z) {
    throw DomainError("transforms: FFTW plan creation failed");
  }
}

Transforms::~Transforms() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(impl_->dst_y);
  fftw_destroy_plan(impl_->dst_z);
  fftw_destroy_plan(impl_->fft_fwd);
  fftw_destroy_plan(impl_->fft_bwd);
  fftw_destroy_plan(impl_->dct_y);
  fftw_destroy_plan(impl_->dct_z);
  fftw_free(impl_->r);
  fftw_free(impl_->c);
  fftw_free(impl_->py);
  fftw_free(impl_->pz);
  delete impl_;
}

namespace {
void check_field(const DomainSpec& dom, const Field& u, Rep want, const char* op) {
  if (!(u.dom == dom)) throw UsageError(std::string(op) + ": field domain does not match engine");
  if (u.rep != want) {
    throw UsageError(std::string(op) + ": field is in the wrong representation");
  }
}
}  // namespace

void Transforms::to_spectral(Field& u) const {
  check_field(dom_, u, Rep::Physical, "to_spectral");
  const int Nx = dom_.Nx, Ny = dom_.Ny, Nz = dom_.Nz;
  const std::size_t N = dom_.size();
  const std::size_t plane = static_cast<std::size_t>(Ny) * Nz;

  std::memcpy(impl_->r, u.phys.data(), N * sizeof(double));
  fftw_execute(impl_->dst_z);
  fftw_execute(impl_->dst_y);

  // Orthonormal sine coefficients, then the dx-weighted Fourier sum with the
  // (-1)^k phase that accounts for the grid origin at x = -X.
  const double s = std::sqrt(dom_.L1 / 2.0) / (Ny + 1) * std::sqrt(dom_.L2 / 2.0) / (Nz + 1);
  for (std::size_t i = 0; i < N; ++i) {
    impl_->c[i][0] = impl_->r[i] * s;
    impl_->c[i][1] = 0.0;
  }
  fftw_execute(impl_->fft_fwd);

  u.spec.resize(N);
  const double dx = dom_.dx();
  for (int k = 0; k < Nx; ++k) {
    const double f = (k % 2 == 0) ? dx : -dx;
    const std::size_t off = k * plane;
    for (std::size_t i = 0; i < plane; ++i) {
      u.spec[off + i] = {impl_->c[off + i][0] * f, impl_->c[off + i][1] * f};
    }
  }
  u.rep = Rep::Spectral;
  u.phys.clear();
  u.phys.shrink_to_fit();
}

void Transforms::to_physical(Field& u) const {
  check_field(dom_, u, Rep::Spectral, "to_physical");
  const int Nx = dom_.Nx, Ny = dom_.Ny, Nz = dom_.Nz;
  const std::size_t N = dom_.size();
  const std::size_t plane = static_cast<std::size_t>(Ny) * Nz;

  const double inv = 1.0 / (2.0 * dom_.X);
  for (int k = 0; k < Nx; ++k) {
    const double f = (k % 2 == 0) ? inv : -inv;
    const std::size_t off = k * plane;
    for (std::size_t i = 0; i < plane; ++i) {
      impl_->c[off + i][0] = u.spec[off + i].real() * f;
      impl_->c[off + i][1] = u.spec[off + i].imag() * f;
    }
  }
  fftw_execute(impl_->fft_bwd);

  const double s = std::sqrt(2.0 / dom_.L1) / 2.0 * std::sqrt(2.0 / dom_.L2) / 2.0;
  for (std::size_t i = 0; i < N; ++i) impl_->r[i] = impl_->c[i][0] * s;
  fftw_execute(impl_->dst_y);
  fftw_execute(impl_->dst_z);

  u.phys.assign(impl_->r, impl_->r + N);
  u.rep = Rep::Physical;
  u.spec.clear();
  u.spec.shrink_to_fit();
}

Field Transforms::physical_copy(const Field& u) const {
  Field v = u;
  if (v.rep == Rep::Spectral) to_physical(v);
  return v;
}

Field Transforms::spectral_copy(const Field& u) const {
  Field v = u;
  if (v.rep == Rep::Physical) to_spectral(v);
  return v;
}

void Transforms::derivative_x(Field& u) const {
  check_field(dom_, u, Rep::Spectral, "derivative_x");
  const int Nx = dom_.Nx;
  const std::size_t plane = static_cast<std::size_t>(dom_.Ny) * dom_.Nz;
  for (int k = 0; k < Nx; ++k) {
    const std::size_t off = k * plane;
    if (k == Nx / 2) {  // unpaired Nyquist slot
      for (std::size_t i = 0; i < plane; ++i) u.spec[off + i] = {0.0, 0.0};
      continue;
    }
    const std::complex<double> ixi{0.0, dom_.xi(k)};
    for (std::size_t i = 0; i < plane; ++i) u.spec[off + i] *= ixi;
  }
}

std::vector<std::uint8_t> Transforms::dealias_mask() const {
  const int Nx = dom_.Nx, Ny = dom_.Ny, Nz = dom_.Nz;
  const int kmax = Nx / 3, l1max = 2 * Ny / 3, l2max = 2 * Nz / 3;
  std::vector<std::uint8_t> mask(dom_.size(), 0);
  for (int k = 0; k < Nx; ++k) {
    const bool kx = std::abs(dom_.signed_k(k)) <= kmax;
    for (int m = 0; m < Ny; ++m) {
      const bool ky = (m + 1) <= l1max;
      for (int n = 0; n < Nz; ++n) {
        if (kx && ky && (n + 1) <= l2max) mask[dom_.index(k, m, n)] = 1;
      }
    }
  }
  return mask;
}

void Transforms::apply_dealias(Field& u) const {
  check_field(dom_, u, Rep::Spectral, "apply_dealias");
  const int Nx = dom_.Nx, Ny = dom_.Ny, Nz = dom_.Nz;
  const int kmax = Nx / 3, l1max = 2 * Ny / 3, l2max = 2 * Nz / 3;
  for (int k = 0; k < Nx; ++k) {
    const bool kx = std::abs(dom_.signed_k(k)) <= kmax;
    for (int m = 0; m < Ny; ++m) {
      const bool keep_y = kx && (m + 1) <= l1max;
      for (int n = 0; n < Nz; ++n) {
        if (!(keep_y && (n + 1) <= l2max)) u.spec[dom_.index(k, m, n)] = {0.0, 0.0};
      }
    }
  }
}

namespace {
// Inverse x-transform of `spec` (optionally premultiplied by i*xi or -xi^2) into the
// real mixed array of sine coefficients per x line.
enum class XOp { None, Ddx, D2dx2 };

void mixed_from_spec(const DomainSpec& dom, fftw_complex* cbuf, fftw_plan bwd,
                     const std::vector<std::complex<double>>& spec, XOp op,
                     std::vector<double>& out) {
  const int Nx = dom.Nx;
  const std::size_t N = dom.size();
  const std::size_t plane = static_cast<std::size_t>(dom.Ny) * dom.Nz;
  const double inv = 1.0 / (2.0 * dom.X);
  for (int k = 0; k < Nx; ++k) {
    const double sign = (k % 2 == 0) ? inv : -inv;
    std::complex<double> f{sign, 0.0};
    if (op == XOp::Ddx) {
      f = (k == Nx / 2) ? std::complex<double>{0.0, 0.0}
                        : std::complex<double>{0.0, dom.xi(k) * sign};
    } else if (op == XOp::D2dx2) {
      f = {-dom.xi(k) * dom.xi(k) * sign, 0.0};
    }
    const std::size_t off = k * plane;
    for (std::size_t i = 0; i < plane; ++i) {
      const std::complex<double> v = spec[off + i] * f;
      cbuf[off + i][0] = v.real();
      cbuf[off + i][1] = v.imag();
    }
  }
  fftw_execute(bwd);
  out.resize(N);
  for (std::size_t i = 0; i < N; ++i) out[i] = cbuf[i][0];
}
}  // namespace

void Transforms::to_mixed(const Field& u, std::vector<double>& mixed) const {
  check_field(dom_, u, Rep::Spectral, "to_mixed");
  mixed_from_spec(dom_, impl_->c, impl_->fft_bwd, u.spec, XOp::None, mixed);
}

Transforms::LineIntegrals Transforms::line_integrals(const Field& u) const {
  check_field(dom_, u, Rep::Spectral, "line_integrals");
  const int Nx = dom_.Nx, Ny = dom_.Ny, Nz = dom_.Nz;
  std::vector<double> M, Dx;
  mixed_from_spec(dom_, impl_->c, impl_->fft_bwd, u.spec, XOp::None, M);
  mixed_from_spec(dom_, impl_->c, impl_->fft_bwd, u.spec, XOp::Ddx, Dx);

  const double pi = std::numbers::pi;
  std::vector<double> ay2(Ny), az2(Nz);
  for (int m = 0; m < Ny; ++m) ay2[m] = std::pow(pi * (m + 1) / dom_.L1, 2);
  for (int n = 0; n < Nz; ++n) az2[n] = std::pow(pi * (n + 1) / dom_.L2, 2);

  LineIntegrals li;
  li.u2.assign(Nx, 0.0);
  li.ux2.assign(Nx, 0.0);
  li.uy2.assign(Nx, 0.0);
  li.uz2.assign(Nx, 0.0);
  for (int j = 0; j < Nx; ++j) {
    double s0 = 0, sx = 0, sy = 0, sz = 0;
    for (int m = 0; m < Ny; ++m) {
      for (int n = 0; n < Nz; ++n) {
        const std::size_t i = dom_.index(j, m, n);
        const double c2 = M[i] * M[i];
        s0 += c2;
        sy += c2 * ay2[m];
        sz += c2 * az2[n];
        sx += Dx[i] * Dx[i];
      }
    }
    li.u2[j] = s0;
    li.ux2[j] = sx;
    li.uy2[j] = sy;
    li.uz2[j] = sz;
  }
  return li;
}

std::vector<double> Transforms::hessian_line_integrals(const Field& u) const {
  check_field(dom_, u, Rep::Spectral, "hessian_line_integrals");
  const int Nx = dom_.Nx, Ny = dom_.Ny, Nz = dom_.Nz;
  std::vector<double> M, Dx, Dxx;
  mixed_from_spec(dom_, impl_->c, impl_->fft_bwd, u.spec, XOp::None, M);
  mixed_from_spec(dom_, impl_->c, impl_->fft_bwd, u.spec, XOp::Ddx, Dx);
  mixed_from_spec(dom_, impl_->c, impl_->fft_bwd, u.spec, XOp::D2dx2, Dxx);

  const double pi = std::numbers::pi;
  std::vector<double> ay(Ny), az(Nz);
  for (int m = 0; m < Ny; ++m) ay[m] = pi * (m + 1) / dom_.L1;
  for (int n = 0; n < Nz; ++n) az[n] = pi * (n + 1) / dom_.L2;

  std::vector<double> h2(Nx, 0.0);
  for (int j = 0; j < Nx; ++j) {
    double s = 0;
    for (int m = 0; m < Ny; ++m) {
      for (int n = 0; n < Nz; ++n) {
        const std::size_t i = dom_.index(j, m, n);
        const double cyy = M[i] * ay[m] * ay[m];
        const double czz = M[i] * az[n] * az[n];
        const double cyz = M[i] * ay[m] * az[n];
        const double cxy = Dx[i] * ay[m];
        const double cxz = Dx[i] * az[n];
        s += Dxx[i] * Dxx[i] + cyy * cyy + czz * czz + cyz * cyz + cxy * cxy + cxz * cxz;
      }
    }
    h2[j] = s;
  }
  return h2;
}

void Transforms::gradient_physical(const Field& u, Field& ux, Field& uy, Field& uz) const {
  check_field(dom_, u, Rep::Spectral, "gradient_physical");
  const int Nx = dom_.Nx, Ny = dom_.Ny, Nz = dom_.Nz;
  const std::size_t N = dom_.size();
  const double pi = std::numbers::pi;

  ux = u;
  derivative_x(ux);
  to_physical(ux);

  std::vector<double> M;
  mixed_from_spec(dom_, impl_->c, impl_->fft_bwd, u.spec, XOp::None, M);

  // u_y: cosine series in y (sampled through a padded REDFT00), sine series in z.
  {
    const double cy = std::sqrt(2.0 / dom_.L1) / 2.0;
    const std::size_t pplane = static_cast<std::size_t>(Ny + 2) * Nz;
    for (int j = 0; j < Nx; ++j) {
      for (int n = 0; n < Nz; ++n) {
        impl_->py[j * pplane + 0 * Nz + n] = 0.0;
        impl_->py[j * pplane + static_cast<std::size_t>(Ny + 1) * Nz + n] = 0.0;
      }
      for (int m = 0; m < Ny; ++m) {
        const double f = cy * pi * (m + 1) / dom_.L1;
        for (int n = 0; n < Nz; ++n) {
          impl_->py[j * pplane + static_cast<std::size_t>(m + 1) * Nz + n] =
              M[dom_.index(j, m, n)] * f;
        }
      }
    }
    fftw_execute(impl_->dct_y);
    const double cz = std::sqrt(2.0 / dom_.L2) / 2.0;
    for (int j = 0; j < Nx; ++j)
      for (int m = 0; m < Ny; ++m)
        for (int n = 0; n < Nz; ++n)
          impl_->r[dom_.index(j, m, n)] =
              impl_->py[j * pplane + static_cast<std::size_t>(m + 1) * Nz + n] * cz;
    fftw_execute(impl_->dst_z);
    uy = make_physical_field(dom_);
    uy.phys.assign(impl_->r, impl_->r + N);
  }

  // u_z: sine series in y, cosine series in z.
  {
    const double cy = std::sqrt(2.0 / dom_.L1) / 2.0;
    for (std::size_t i = 0; i < N; ++i) impl_->r[i] = M[i] * cy;
    fftw_execute(impl_->dst_y);
    const double cz = std::sqrt(2.0 / dom_.L2) / 2.0;
    const std::size_t prow = Nz + 2;
    for (int j = 0; j < Nx; ++j) {
      for (int m = 0; m < Ny; ++m) {
        double* row = impl_->pz + (static_cast<std::size_t>(j) * Ny + m) * prow;
        row[0] = 0.0;
        row[Nz + 1] = 0.0;
        for (int n = 0; n < Nz; ++n)
          row[n + 1] = impl_->r[dom_.index(j, m, n)] * cz * pi * (n + 1) / dom_.L2;
      }
    }
    fftw_execute(impl_->dct_z);
    uz = make_physical_field(dom_);
    for (int j = 0; j < Nx; ++j)
      for (int m = 0; m < Ny; ++m) {
        const double* row = impl_->pz + (static_cast<std::size_t>(j) * Ny + m) * prow;
        for (int n = 0; n < Nz; ++n) uz.phys[dom_.index(j, m, n)] = row[n + 1];
      }
  }
}

}  // namespace zk
