#include "zk/linear.hpp"

#include <cmath>
#include <string>

#include "zk/errors.hpp"
#include "zk/quadrature.hpp"

namespace zk {

void LinearParams::validate() const {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw DomainError("linear: delta must be in [0, 1], got " + std::to_string(delta));
  }
  if (!std::isfinite(b)) throw DomainError("linear: b must be finite");
}

std::complex<double> symbol(double xi, double lambda, const LinearParams& p) {
  return {-p.delta * (xi * xi + lambda), xi * xi * xi - p.b * xi + xi * lambda};
}

namespace {
std::vector<double> lambda_table(const DomainSpec& dom) {
  std::vector<double> lam(static_cast<std::size_t>(dom.Ny) * dom.Nz);
  for (int m = 0; m < dom.Ny; ++m)
    for (int n = 0; n < dom.Nz; ++n)
      lam[static_cast<std::size_t>(m) * dom.Nz + n] = eigenvalue(dom, m + 1, n + 1);
  return lam;
}
}  // namespace

void propagate(const Transforms& tr, Field& u, double t, const LinearParams& p) {
  p.validate();
  if (u.rep != Rep::Spectral) throw UsageError("propagate: field must be spectral");
  if (!(t >= 0.0)) throw UsageError("propagate: t must be >= 0");
  const DomainSpec& dom = tr.dom();
  if (!(u.dom == dom)) throw UsageError("propagate: field domain does not match engine");
  const auto lam = lambda_table(dom);
  const std::size_t plane = lam.size();
  for (int k = 0; k < dom.Nx; ++k) {
    const double xi = dom.xi(k);
    const bool nyquist = (k == dom.Nx / 2);
    const std::size_t off = k * plane;
    for (std::size_t i = 0; i < plane; ++i) {
      std::complex<double> s = symbol(xi, lam[i], p);
      if (nyquist) s = {s.real(), 0.0};
      u.spec[off + i] *= std::exp(s * t);
    }
  }
}

void duhamel_apply(const Transforms& tr, Field& u, double t, const LinearParams& p,
                   const TimeField& forcing, int nq) {
  if (!(t >= 0.0)) throw UsageError("duhamel_apply: t must be >= 0");
  if (nq < 1) throw UsageError("duhamel_apply: quadrature order must be >= 1");
  propagate(tr, u, t, p);
  if (!forcing || t == 0.0) return;
  const QuadNodes gl = gauss_legendre01(nq);
  for (int q = 0; q < nq; ++q) {
    const double tau = t * gl.x[q];
    Field fq = tr.spectral_copy(forcing(tau));
    propagate(tr, fq, t - tau, p);
    const double w = t * gl.w[q];
    for (std::size_t i = 0; i < u.spec.size(); ++i) u.spec[i] += w * fq.spec[i];
  }
}

namespace {
// Barycentric interpolation of spectral fields stored at the distinct nodes `tau`.
Field interp_fields(const Transforms& tr, const std::vector<double>& tau,
                    const std::vector<Field>& v, double s) {
  const int n = static_cast<int>(tau.size());
  for (int q = 0; q < n; ++q) {
    if (s == tau[q]) return v[q];
  }
  std::vector<double> bw(n, 1.0);
  for (int q = 0; q < n; ++q)
    for (int r = 0; r < n; ++r)
      if (r != q) bw[q] /= (tau[q] - tau[r]);
  double den = 0.0;
  std::vector<double> c(n);
  for (int q = 0; q < n; ++q) {
    c[q] = bw[q] / (s - tau[q]);
    den += c[q];
  }
  Field out = make_spectral_field(tr.dom());
  for (int q = 0; q < n; ++q) {
    const double w = c[q] / den;
    for (std::size_t i = 0; i < out.spec.size(); ++i) out.spec[i] += w * v[q].spec[i];
  }
  return out;
}
}  // namespace

PicardResult picard_iterate(const Transforms& tr, const Field& u0, double t,
                            const LinearParams& p, const GhFunction* gh,
                            const TimeField* forcing, int n_iter, int nq) {
  p.validate();
  if (!(p.delta > 0.0)) throw UsageError("picard_iterate: requires delta > 0");
  if (!(t > 0.0)) throw UsageError("picard_iterate: requires t > 0");
  if (n_iter < 1) throw UsageError("picard_iterate: need at least one iterate");
  const Field u0s = tr.spectral_copy(u0);
  const bool dealias = tr.dom().dealias;

  const QuadNodes gl = gauss_legendre01(nq);
  // Iterates live at the quadrature nodes plus the endpoint t (last entry).
  std::vector<double> times(gl.x.size());
  for (std::size_t q = 0; q < gl.x.size(); ++q) times[q] = t * gl.x[q];
  std::vector<double> nodes = times;  // interpolation nodes (endpoint excluded)
  times.push_back(t);

  auto lin_at = [&](double s) {
    Field v = u0s;
    propagate(tr, v, s, p);
    return v;
  };

  std::vector<Field> cur;
  cur.reserve(times.size());
  for (double s : times) cur.push_back(lin_at(s));

  // Spectral forcing of the fixed-point map at state v and time sigma.
  auto map_forcing = [&](const std::vector<Field>& prev, double sigma) {
    Field w = interp_fields(tr, nodes, prev, sigma);
    if (gh) {
      if (dealias) tr.apply_dealias(w);
      tr.to_physical(w);
      for (double& x : w.phys) x = gh->eval(x);
      tr.to_spectral(w);
    } else {
      for (auto& x : w.spec) x = {0.0, 0.0};
    }
    tr.derivative_x(w);
    if (dealias) tr.apply_dealias(w);
    for (auto& x : w.spec) x = -x;
    if (forcing && *forcing) {
      Field f = tr.spectral_copy((*forcing)(sigma));
      for (std::size_t i = 0; i < w.spec.size(); ++i) w.spec[i] += f.spec[i];
    }
    return w;
  };

  PicardResult result;
  double prev_sup = 0.0;
  for (const Field& v : cur) prev_sup = std::max(prev_sup, l2_norm(v));
  for (int it = 0; it < n_iter; ++it) {
    std::vector<Field> next;
    next.reserve(times.size());
    for (double s : times) {
      Field v = lin_at(s);
      if (s > 0.0) {
        for (std::size_t q = 0; q < gl.x.size(); ++q) {
          const double sigma = s * gl.x[q];
          Field fq = map_forcing(cur, sigma);
          propagate(tr, fq, s - sigma, p);
          const double w = s * gl.w[q];
          for (std::size_t i = 0; i < v.spec.size(); ++i) v.spec[i] += w * fq.spec[i];
        }
      }
      next.push_back(std::move(v));
    }
    double d = 0.0, sup = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      Field diff = next[i];
      for (std::size_t j = 0; j < diff.spec.size(); ++j) diff.spec[j] -= cur[i].spec[j];
      d = std::max(d, l2_norm(diff));
      sup = std::max(sup, l2_norm(next[i]));
    }
    if (sup > 10.0 * prev_sup && prev_sup > 0.0) {
      throw ConvergenceError("picard_iterate: iterate norm grew more than tenfold (t too large)");
    }
    prev_sup = sup;
    result.diffs.push_back(d);
    cur = std::move(next);
  }
  result.final = cur.back();
  return result;
}

}  // namespace zk
