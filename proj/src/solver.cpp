#include "zk/solver.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "zk/errors.hpp"

namespace zk {

void SolverConfig::validate() const {
  if (!std::isfinite(b)) throw DomainError("solver: b must be finite");
  if (!(h >= 0.0 && h <= 1.0)) throw DomainError("solver: h must be in [0, 1], got " + std::to_string(h));
  if (!(dt > 0.0)) throw DomainError("solver: dt must be positive");
  if (!(T >= dt)) throw DomainError("solver: T must be at least dt");
  if (snapshot_stride < 1) throw DomainError("solver: snapshot_stride must be >= 1");
  const double n = std::round(T / dt);
  if (!(n >= 1.0) || std::abs(n * dt - T) > 1e-9 * std::max(1.0, T)) {
    throw DomainError("solver: T must be an integer multiple of dt");
  }
  if (picard_check && !(h > 0.0)) throw DomainError("solver: picard_check requires h > 0");
  if (picard_check && nonlinearity == Nonlinearity::Off) {
    throw DomainError("solver: picard_check requires an active nonlinearity");
  }
}

long SolverConfig::steps() const { return std::lround(T / dt); }

namespace {

double spectral_sumsq(const Field& u) {
  double s = 0.0;
  for (const auto& c : u.spec) s += c.real() * c.real() + c.imag() * c.imag();
  return s;
}

double l2sq_of(const Field& u) { return spectral_sumsq(u) / (2.0 * u.dom.X); }

double residual_of(double lhs, double rhs) {
  const double den = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
  return std::abs(lhs - rhs) / den;
}

}  // namespace

Stepper::Stepper(const Transforms& tr, const SolverConfig& cfg, const Forcing* forcing)
    : tr_(tr),
      cfg_(cfg),
      forcing_(forcing),
      k1_(make_spectral_field(tr.dom())),
      k2_(make_spectral_field(tr.dom())),
      k3_(make_spectral_field(tr.dom())),
      k4_(make_spectral_field(tr.dom())),
      u1_(make_spectral_field(tr.dom())) {
  cfg_.validate();
  if (forcing_ && !(forcing_->profile.dom == tr.dom())) {
    throw UsageError("stepper: forcing profile domain mismatch");
  }
  if (forcing_ && forcing_->profile.rep != Rep::Spectral) {
    throw UsageError("stepper: forcing profile must be spectral");
  }
  if (cfg_.nonlinear_active()) {
    gh_.emplace(cfg_.nonlinearity == Nonlinearity::Auto ? cfg_.h : 0.0);
  }

  const DomainSpec& dom = tr.dom();
  const LinearParams p = cfg_.linear();
  e_half_.resize(dom.size());
  e_full_.resize(dom.size());
  for (int k = 0; k < dom.Nx; ++k) {
    const double xi = dom.xi(k);
    const bool nyquist = (k == dom.Nx / 2);
    for (int m = 0; m < dom.Ny; ++m) {
      for (int n = 0; n < dom.Nz; ++n) {
        std::complex<double> s = symbol(xi, eigenvalue(dom, m + 1, n + 1), p);
        if (nyquist) s = {s.real(), 0.0};
        const std::size_t i = dom.index(k, m, n);
        e_half_[i] = std::exp(s * (0.5 * cfg_.dt));
        e_full_[i] = e_half_[i] * e_half_[i];
      }
    }
  }
}

void Stepper::rhs(const Field& v, double t, Field& out, bool collect_max) {
  out.spec = v.spec;
  out.rep = Rep::Spectral;
  if (tr_.dom().dealias) tr_.apply_dealias(out);
  tr_.to_physical(out);
  double mx = 0.0;
  std::ptrdiff_t bad = -1;
  const double huge = 1e153;  // g(u) ~ u^2/2 overflows past this
  for (std::size_t i = 0; i < out.phys.size(); ++i) {
    const double a = std::abs(out.phys[i]);
    if (!(a < huge) && bad < 0) bad = static_cast<std::ptrdiff_t>(i);
    if (a > mx) mx = a;
    out.phys[i] = gh_->eval(out.phys[i]);
  }
  if (bad >= 0) {
    throw DataError("nonlinear rhs: non-finite or overflowing value at grid index " +
                    std::to_string(bad));
  }
  if (collect_max) stage_max_ = mx;
  tr_.to_spectral(out);
  tr_.derivative_x(out);
  for (auto& c : out.spec) c = -c;
  if (tr_.dom().dealias) tr_.apply_dealias(out);
  if (forcing_) {
    const double a = forcing_->amp(t);
    const auto& f = forcing_->profile.spec;
    for (std::size_t i = 0; i < out.spec.size(); ++i) out.spec[i] += a * f[i];
  }
}

void Stepper::step(Field& u, double t) {
  if (u.rep != Rep::Spectral) throw UsageError("stepper: state must be spectral");
  const std::size_t n = u.spec.size();
  if (!cfg_.nonlinear_active() && !forcing_) {
    for (std::size_t i = 0; i < n; ++i) u.spec[i] *= e_full_[i];
    return;
  }
  if (!cfg_.nonlinear_active()) {
    // Linear forced problem: the stages collapse onto the forcing term alone.
    const double dt = cfg_.dt, half = 0.5 * dt;
    const auto& f = forcing_->profile.spec;
    const double a1 = forcing_->amp(t), a2 = forcing_->amp(t + half), a4 = forcing_->amp(t + dt);
    for (std::size_t i = 0; i < n; ++i) {
      u.spec[i] = e_full_[i] * (u.spec[i] + (dt / 6.0) * (a1 * f[i])) +
                  (2.0 * dt / 3.0) * a2 * (e_half_[i] * f[i]) + (dt / 6.0) * (a4 * f[i]);
    }
    return;
  }
  const double dt = cfg_.dt, half = 0.5 * dt, w = dt / 6.0;
  rhs(u, t, k1_, true);
  for (std::size_t i = 0; i < n; ++i) u1_.spec[i] = e_half_[i] * (u.spec[i] + half * k1_.spec[i]);
  rhs(u1_, t + half, k2_, false);
  for (std::size_t i = 0; i < n; ++i) u1_.spec[i] = e_half_[i] * u.spec[i] + half * k2_.spec[i];
  rhs(u1_, t + half, k3_, false);
  for (std::size_t i = 0; i < n; ++i) {
    u1_.spec[i] = e_full_[i] * u.spec[i] + dt * (e_half_[i] * k3_.spec[i]);
  }
  rhs(u1_, t + dt, k4_, false);
  for (std::size_t i = 0; i < n; ++i) {
    u.spec[i] = e_full_[i] * (u.spec[i] + w * k1_.spec[i]) +
                (2.0 * w) * (e_half_[i] * (k2_.spec[i] + k3_.spec[i])) + w * k4_.spec[i];
  }
}

RunResult run(const Transforms& tr, Field u0, const SolverConfig& cfg, const Forcing* forcing,
              const DiagnosticsConfig& diag, const RecordHook& hook) {
  cfg.validate();
  diag.weight.validate();
  const DomainSpec& dom = tr.dom();
  if (!(u0.dom == dom)) throw UsageError("run: field domain mismatch");
  if (u0.rep == Rep::Physical) tr.to_spectral(u0);
  if (dom.dealias) tr.apply_dealias(u0);

  const bool weighted_id = diag.weighted_identity;
  if (weighted_id && diag.weight.kind != WeightKind::Exp2Alpha) {
    throw UsageError("run: the weighted identity needs the exponential weight");
  }
  const Weight w(diag.weight);

  Forcing masked_forcing;
  if (forcing) {
    masked_forcing.profile = tr.spectral_copy(forcing->profile);
    if (dom.dealias) tr.apply_dealias(masked_forcing.profile);
    masked_forcing.amp = forcing->amp;
  }
  const Forcing* fptr = forcing ? &masked_forcing : nullptr;
  Field fphys = make_physical_field(dom);
  if (fptr && weighted_id) fphys = tr.physical_copy(fptr->profile);

  const int Nx = dom.Nx;
  const double dx = dom.dx(), cell = dom.cell(), twoX = 2.0 * dom.X;
  const double wmax =
      diag.window_max ? *diag.window_max : std::numeric_limits<double>::infinity();
  std::vector<double> psi(Nx), psi1(Nx), psi2(Nx), psi3(Nx);
  std::vector<std::uint8_t> inwin(Nx);
  for (int j = 0; j < Nx; ++j) {
    const double x = dom.x(j);
    inwin[j] = (x <= wmax + 1e-12) ? 1 : 0;
    psi[j] = w.value(x);
    if (weighted_id) {
      psi1[j] = w.d1(x);
      psi2[j] = w.d2(x);
      psi3[j] = w.d3(x);
    }
  }

  Stepper stepper(tr, cfg, fptr);
  const long nsteps = cfg.steps();
  const double dt = cfg.dt;
  const double ximax = dom.xi_max_dealiased();
  const bool need_lines = (cfg.h > 0.0) || weighted_id;
  const bool need_phys_step = weighted_id && (cfg.nonlinear_active() || fptr != nullptr);

  RunResult res;
  res.h = cfg.h;
  res.b = cfg.b;
  res.had_forcing = (fptr != nullptr);
  res.weighted_identity = weighted_id;

  struct Integrands {
    double diss = 0, work = 0, grad = 0, wdiss = 0, pot = 0, star = 0, force = 0;
  };
  auto eval_integrands = [&](const Field& us, double t, const Field* up) {
    Integrands iv;
    if (need_lines) {
      const auto L = tr.line_integrals(us);
      if (cfg.h > 0.0) {
        double s = 0.0;
        for (int j = 0; j < Nx; ++j) s += L.ux2[j] + L.uy2[j] + L.uz2[j];
        iv.diss = 2.0 * cfg.h * s * dx;
      }
      if (weighted_id) {
        double g = 0.0, wd = 0.0, pt = 0.0;
        for (int j = 0; j < Nx; ++j) {
          if (!inwin[j]) continue;
          g += psi1[j] * (3.0 * L.ux2[j] + L.uy2[j] + L.uz2[j]);
          wd += psi[j] * (L.ux2[j] + L.uy2[j] + L.uz2[j]);
          pt += (cfg.b * psi1[j] + psi3[j] + cfg.h * psi2[j]) * L.u2[j];
        }
        iv.grad = g * dx;
        iv.wdiss = 2.0 * cfg.h * wd * dx;
        iv.pot = pt * dx;
      }
    }
    if (fptr) {
      double d = 0.0;
      const auto& f = fptr->profile.spec;
      for (std::size_t i = 0; i < us.spec.size(); ++i) {
        d += f[i].real() * us.spec[i].real() + f[i].imag() * us.spec[i].imag();
      }
      iv.work = 2.0 * fptr->amp(t) * d / twoX;
    }
    if (weighted_id && up) {
      const GhFunction* gh = stepper.gh();
      const int NyNz = dom.Ny * dom.Nz;
      double st = 0.0, fo = 0.0;
      for (int j = 0; j < Nx; ++j) {
        if (!inwin[j]) continue;
        const std::size_t off = static_cast<std::size_t>(j) * NyNz;
        if (gh) {
          double s = 0.0;
          for (int i = 0; i < NyNz; ++i) s += gh->star(up->phys[off + i]);
          st += s * psi1[j];
        }
        if (fptr) {
          double s = 0.0;
          for (int i = 0; i < NyNz; ++i) s += fphys.phys[off + i] * up->phys[off + i];
          fo += s * psi[j];
        }
      }
      iv.star = 2.0 * st * cell;
      iv.force = fptr ? 2.0 * fptr->amp(t) * fo * cell : 0.0;
    }
    return iv;
  };

  double qdiss = 0, qwork = 0, agrad = 0, adiss = 0, apot = 0, astar = 0, aforce = 0;
  double l2sq0 = l2sq_of(u0);
  double wsq0 = 0.0;

  auto weighted_sq = [&](const Field& up) {
    const double v = diag.window_max ? weighted_l2_norm_window(up, w, wmax)
                                     : weighted_l2_norm(up, w);
    return v * v;
  };

  auto record = [&](double t, const Field& us) {
    Field up = tr.physical_copy(us);
    MetricRecord r;
    r.t = t;
    const double l2sq = l2sq_of(us);
    r.l2 = std::sqrt(l2sq);
    const auto L = tr.line_integrals(us);
    double grad = 0.0;
    for (int j = 0; j < Nx; ++j) grad += L.ux2[j] + L.uy2[j] + L.uz2[j];
    double cub = 0.0;
    for (double v : up.phys) cub += v * v * v;
    r.energy = grad * dx - cub * cell / 3.0;
    r.weighted_l2 = diag.window_max ? weighted_l2_norm_window(up, w, wmax)
                                    : weighted_l2_norm(up, w);
    r.max_abs = max_abs(up);
    const int NyNz = dom.Ny * dom.Nz;
    double seam = 0.0;
    for (int j = 0; j < Nx; ++j) {
      const bool guard_col = diag.window_max ? !inwin[j] : (j == 0 || j == Nx - 1);
      if (!guard_col) continue;
      const std::size_t off = static_cast<std::size_t>(j) * NyNz;
      for (int i = 0; i < NyNz; ++i) seam = std::max(seam, std::abs(up.phys[off + i]));
    }
    r.seam_magnitude = seam;
    if (seam > diag.guard_threshold) res.truncation_warning = true;
    r.res_l2 = residual_of(l2sq + qdiss, l2sq0 + qwork);
    if (weighted_id) {
      r.res_weighted = residual_of(weighted_sq(up) + agrad + adiss - apot,
                                   wsq0 + aforce + astar);
    } else {
      r.res_weighted = std::numeric_limits<double>::quiet_NaN();
    }
    if (diag.track_gradient_lines) {
      std::vector<double> g(Nx);
      for (int j = 0; j < Nx; ++j) g[j] = L.ux2[j] + L.uy2[j] + L.uz2[j];
      res.grad_lines.push_back(std::move(g));
    }
    res.records.push_back(r);
    if (hook) hook(t, us);
  };

  Field up0;
  const Field* up0p = nullptr;
  if (need_phys_step || weighted_id) {
    up0 = tr.physical_copy(u0);
    up0p = &up0;
    if (weighted_id) wsq0 = weighted_sq(up0);
  }
  Integrands prev = eval_integrands(u0, 0.0, up0p);
  record(0.0, u0);

  std::optional<PicardResult> picard;
  if (cfg.picard_check) {
    TimeField tf;
    if (fptr) {
      tf = [&](double t) {
        Field f = tr.spectral_copy(fptr->profile);
        const double a = fptr->amp(t);
        for (auto& c : f.spec) c *= a;
        return f;
      };
    }
    picard = picard_iterate(tr, u0, dt, cfg.linear(), stepper.gh(), fptr ? &tf : nullptr, 4);
  }

  Field u = std::move(u0);
  for (long n = 0; n < nsteps; ++n) {
    const double t = static_cast<double>(n) * dt;
    stepper.step(u, t);
    if (cfg.nonlinear_active()) {
      const double mx = stepper.stage_max();
      if (!std::isfinite(mx)) {
        throw InstabilityError("state non-finite entering step " + std::to_string(n + 1));
      }
      if (dt * mx * ximax > 0.5 * (1.0 + 1e-9)) {
        throw InstabilityError("stability guard dt*max|u|*xi_max = " +
                               std::to_string(dt * mx * ximax) + " > 0.5 at step " +
                               std::to_string(n + 1));
      }
      if (!std::isfinite(spectral_sumsq(u))) {
        throw InstabilityError("state non-finite after step " + std::to_string(n + 1));
      }
    }
    const double t1 = static_cast<double>(n + 1) * dt;
    if (n == 0 && picard) {
      PicardCheck pc;
      pc.diffs = picard->diffs;
      double d2 = 0.0;
      for (std::size_t i = 0; i < u.spec.size(); ++i) {
        const auto diff = picard->final.spec[i] - u.spec[i];
        d2 += diff.real() * diff.real() + diff.imag() * diff.imag();
      }
      pc.vs_step = std::sqrt(d2 / twoX);
      res.picard = std::move(pc);
      picard.reset();
    }
    Field upn;
    const Field* upnp = nullptr;
    if (need_phys_step) {
      upn = tr.physical_copy(u);
      upnp = &upn;
    }
    const Integrands cur = eval_integrands(u, t1, upnp);
    const double hdt = 0.5 * dt;
    qdiss += hdt * (prev.diss + cur.diss);
    qwork += hdt * (prev.work + cur.work);
    agrad += hdt * (prev.grad + cur.grad);
    adiss += hdt * (prev.wdiss + cur.wdiss);
    apot += hdt * (prev.pot + cur.pot);
    astar += hdt * (prev.star + cur.star);
    aforce += hdt * (prev.force + cur.force);
    prev = cur;
    if ((n + 1) % cfg.snapshot_stride == 0 || n + 1 == nsteps) record(t1, u);
  }
  res.t_final = static_cast<double>(nsteps) * dt;
  res.step_count = nsteps;
  return res;
}

}  // namespace zk
