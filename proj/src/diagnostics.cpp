#include "zk/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "zk/errors.hpp"

namespace zk {

namespace {

double ols_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  return num / den;
}

double spectral_l2_distance(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.spec.size(); ++i) {
    const auto d = a.spec[i] - b.spec[i];
    s += d.real() * d.real() + d.imag() * d.imag();
  }
  return std::sqrt(s / (2.0 * a.dom.X));
}

}  // namespace

ConservationReport conservation_report(const RunResult& run) {
  if (run.had_forcing) {
    throw UsageError("conservation report: only meaningful for unforced runs");
  }
  if (run.records.size() < 2) {
    throw UsageError("conservation report: need at least two records");
  }
  ConservationReport rep;
  const double l2sq0 = run.records[0].l2 * run.records[0].l2;
  const double e0 = run.records[0].energy;
  rep.e0 = e0;
  const double dl = std::max(l2sq0, 1e-300);
  const double de = std::max(std::abs(e0), 1e-300);
  for (const auto& r : run.records) {
    rep.l2_drift = std::max(rep.l2_drift, std::abs(r.l2 * r.l2 - l2sq0) / dl);
    rep.energy_drift = std::max(rep.energy_drift, std::abs(r.energy - e0) / de);
  }
  return rep;
}

FriedrichsReport friedrichs_min_rayleigh(const DomainSpec& dom) {
  dom.validate();
  const auto modes = enumerate_modes(dom, dom.Ny * dom.Nz);
  FriedrichsReport rep;
  rep.min_rayleigh = modes.front().lambda;
  for (const auto& m : modes) rep.min_rayleigh = std::min(rep.min_rayleigh, m.lambda);
  rep.remark_bound = std::min(dom.L1, dom.L2) / std::acos(-1.0);
  return rep;
}

double rayleigh_quotient(const Transforms& tr, const Field& u) {
  const Field us = tr.spectral_copy(u);
  const auto L = tr.line_integrals(us);
  double num = 0.0, den = 0.0;
  for (int j = 0; j < u.dom.Nx; ++j) {
    num += L.uy2[j] + L.uz2[j];
    den += L.u2[j];
  }
  if (!(den > 0.0)) throw UsageError("rayleigh quotient: zero field");
  return num / den;
}

DecayPrediction decay_prediction(const DomainSpec& dom, double alpha, double b) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("decay prediction: alpha must be in (0, 1], got " +
                      std::to_string(alpha));
  }
  DecayPrediction p;
  p.alpha = alpha;
  p.lambda11 = eigenvalue(dom, 1, 1);
  p.b = b;
  p.rate = 2.0 * alpha * (p.lambda11 - b - 4.0 * alpha * alpha);
  return p;
}

DecayReport decay_experiment(const Transforms& tr, Field u0, const SolverConfig& cfg,
                             double alpha, double window_max, double guard_threshold) {
  DecayReport rep;
  rep.prediction = decay_prediction(tr.dom(), alpha, cfg.b);

  DiagnosticsConfig diag;
  diag.weight = WeightSpec{WeightKind::Exp2Alpha, alpha, 1.0, false};
  diag.window_max = window_max;
  diag.guard_threshold = guard_threshold;
  diag.weighted_identity = true;
  rep.run = run(tr, std::move(u0), cfg, nullptr, diag);

  for (const auto& r : rep.run.records) {
    rep.times.push_back(r.t);
    rep.norms.push_back(r.weighted_l2);
  }
  rep.nonincreasing = true;
  for (std::size_t i = 0; i + 1 < rep.norms.size(); ++i) {
    if (rep.norms[i + 1] > rep.norms[i] * (1.0 + 1e-10) + 1e-300) {
      rep.nonincreasing = false;
      break;
    }
  }
  const double w0 = rep.norms.empty() ? 0.0 : rep.norms.front();
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * w0;
  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < rep.norms.size(); ++i) {
    if (rep.norms[i] > floor && rep.norms[i] > 0.0) {
      ts.push_back(rep.times[i]);
      ys.push_back(2.0 * std::log(rep.norms[i]));
    }
  }
  rep.rate_defined = (w0 > 0.0) && (ts.size() >= 2);
  if (rep.rate_defined) rep.fitted_rate = -ols_slope(ts, ys);
  rep.valid = !rep.run.truncation_warning;
  return rep;
}

InterpResult interpolation_ratio(const Transforms& tr, const Field& phi,
                                 const InterpSpec& spec) {
  spec.w1.validate();
  spec.w2.validate();
  if (spec.k != 1 && spec.k != 2) {
    throw UsageError("interpolation ratio: k must be 1 or 2, got " + std::to_string(spec.k));
  }
  if (spec.m < 0 || spec.m >= spec.k) {
    throw UsageError("interpolation ratio: need 0 <= m < k, got m = " +
                     std::to_string(spec.m));
  }
  const int gap = spec.k - spec.m;
  if (gap == 1) {
    if (!(spec.q >= 2.0 && spec.q <= 6.0)) {
      throw UsageError("interpolation ratio: q must lie in [2, 6] when k - m = 1");
    }
  } else {
    if (!(spec.q >= 2.0)) {
      throw UsageError("interpolation ratio: q must be >= 2 when k - m = 2");
    }
  }
  double s = (2.0 * spec.m + 3.0) / (4.0 * spec.k) - 3.0 / (2.0 * spec.k * spec.q);
  if (s < -1e-12 || 2.0 * s > 1.0 + 1e-12) {
    throw UsageError("interpolation ratio: exponent s out of [0, 1/2]");
  }
  s = std::min(std::max(s, 0.0), 0.5);

  const Weight w1(spec.w1), w2(spec.w2);
  const DomainSpec& dom = tr.dom();
  const Field us = tr.spectral_copy(phi);
  const Field up = tr.physical_copy(phi);

  const double B = weighted_l2_norm(up, w2);
  double a2 = 0.0;
  if (spec.k == 1) {
    const double A1 = weighted_h1_seminorm(tr, us, w1);
    a2 = A1 * A1;
  } else {
    const auto h2 = tr.hessian_line_integrals(us);
    for (int j = 0; j < dom.Nx; ++j) a2 += w1.value(dom.x(j)) * h2[j];
    a2 *= dom.dx();
  }
  const double A = std::sqrt(a2);

  const int NyNz = dom.Ny * dom.Nz;
  std::vector<double> colw(dom.Nx);
  for (int j = 0; j < dom.Nx; ++j) {
    const double x = dom.x(j);
    colw[j] = std::pow(std::pow(w1.value(x), s) * std::pow(w2.value(x), 0.5 - s), spec.q);
  }
  double lq = 0.0;
  if (spec.m == 0) {
    for (int j = 0; j < dom.Nx; ++j) {
      const std::size_t off = static_cast<std::size_t>(j) * NyNz;
      double col = 0.0;
      for (int i = 0; i < NyNz; ++i) col += std::pow(std::abs(up.phys[off + i]), spec.q);
      lq += col * colw[j];
    }
  } else {
    Field gx = make_physical_field(dom), gy = make_physical_field(dom),
          gz = make_physical_field(dom);
    tr.gradient_physical(us, gx, gy, gz);
    for (int j = 0; j < dom.Nx; ++j) {
      const std::size_t off = static_cast<std::size_t>(j) * NyNz;
      double col = 0.0;
      for (int i = 0; i < NyNz; ++i) {
        const double m2 = gx.phys[off + i] * gx.phys[off + i] +
                          gy.phys[off + i] * gy.phys[off + i] +
                          gz.phys[off + i] * gz.phys[off + i];
        col += std::pow(m2, 0.5 * spec.q);
      }
      lq += col * colw[j];
    }
  }
  const double lhs = std::pow(lq * dom.cell(), 1.0 / spec.q);
  const double rhs = std::pow(A, 2.0 * s) * std::pow(B, 1.0 - 2.0 * s) + B;

  InterpResult res;
  res.exponent = s;
  if (!(rhs > 0.0)) {
    res.degenerate = true;
    return res;
  }
  res.ratio = lhs / rhs;
  return res;
}

Field random_band_limited(const Transforms& tr, int kband, int l1band, int l2band,
                          std::uint64_t seed) {
  const DomainSpec& dom = tr.dom();
  Field f = make_spectral_field(dom);
  const CounterRng rng(seed);
  const int kb = std::min(kband, dom.Nx / 2 - 1);
  const int lb1 = std::min(l1band, dom.Ny);
  const int lb2 = std::min(l2band, dom.Nz);
  if (kb < 0 || lb1 < 1 || lb2 < 1) {
    throw UsageError("random field: bands must allow at least one mode");
  }
  // flat spectrum inside the band: with every retained mode at equal variance a draw
  // has a few hundred comparable degrees of freedom, so shape statistics (and the
  // audit's running max) self-average instead of riding the tail of a couple of
  // dominant low modes.
  for (int m = 0; m < lb1; ++m) {
    for (int n = 0; n < lb2; ++n) {
      for (int sk = 0; sk <= kb; ++sk) {
        const std::uint64_t c =
            2 * ((static_cast<std::uint64_t>(sk) * dom.Ny + m) * dom.Nz + n);
        if (sk == 0) {
          f.spec[dom.index(0, m, n)] = rng.uniform_sym(c);
        } else {
          const std::complex<double> z(rng.uniform_sym(c), rng.uniform_sym(c + 1));
          f.spec[dom.index(sk, m, n)] = z;
          f.spec[dom.index(dom.Nx - sk, m, n)] = std::conj(z);
        }
      }
    }
  }
  const double nrm = l2_norm(f);
  if (!(nrm > 0.0)) throw DataError("random field: drew an exactly zero field");
  for (auto& c : f.spec) c /= nrm;
  return f;
}

InterpolationAudit interpolation_audit(const Transforms& tr, const InterpSpec& spec,
                                       int n_fields, std::uint64_t seed) {
  if (n_fields < 1) throw UsageError("interpolation audit: need at least one field");
  const DomainSpec& dom = tr.dom();
  const int kb = std::max(1, dom.Nx / 4);
  const int lb1 = std::max(1, dom.Ny / 2);
  const int lb2 = std::max(1, dom.Nz / 2);
  InterpolationAudit audit;
  for (int i = 0; i < n_fields; ++i) {
    const Field f = random_band_limited(tr, kb, lb1, lb2,
                                        CounterRng::hash(seed) + static_cast<std::uint64_t>(i));
    const InterpResult r = interpolation_ratio(tr, f, spec);
    if (r.degenerate) ++audit.degenerate_count;
    audit.ratios.push_back(r.ratio);
    audit.max_ratio = std::max(audit.max_ratio, r.ratio);
  }
  return audit;
}

double identity_residual(const RunResult& run, IdentityKind kind) {
  if (run.records.empty()) throw UsageError("identity residual: run has no records");
  double worst = 0.0;
  switch (kind) {
    case IdentityKind::MassBalance:
      if (run.h != 0.0) {
        throw UsageError("identity residual: mass balance applies to h = 0 runs");
      }
      for (const auto& r : run.records) worst = std::max(worst, r.res_l2);
      return worst;
    case IdentityKind::RegularizedMass:
      if (!(run.h > 0.0)) {
        throw UsageError("identity residual: regularized balance needs h > 0");
      }
      for (const auto& r : run.records) worst = std::max(worst, r.res_l2);
      return worst;
    case IdentityKind::WeightedExp:
      if (!run.weighted_identity) {
        throw UsageError("identity residual: run did not track the weighted identity");
      }
      for (const auto& r : run.records) worst = std::max(worst, r.res_weighted);
      return worst;
  }
  throw UsageError("identity residual: unknown kind");
}

double local_smoothing_of_run(const DomainSpec& dom, const RunResult& run) {
  if (run.grad_lines.size() != run.records.size() || run.records.size() < 2) {
    throw UsageError("local smoothing: run did not track gradient lines");
  }
  std::vector<double> times;
  for (const auto& r : run.records) times.push_back(r.t);
  return local_smoothing_lambda(dom, times, run.grad_lines);
}

ContinuousDependenceReport continuous_dependence(const Transforms& tr, const Field& u0,
                                                 const Field& perturbation,
                                                 const std::vector<double>& eps_ladder,
                                                 const SolverConfig& cfg,
                                                 const WeightSpec& wspec) {
  if (eps_ladder.empty()) throw UsageError("continuous dependence: empty eps ladder");
  if (!(u0.dom == tr.dom()) || !(perturbation.dom == tr.dom())) {
    throw UsageError("continuous dependence: domain mismatch");
  }
  wspec.validate();
  const Weight w(wspec);

  ContinuousDependenceReport rep;
  rep.eps = eps_ladder;

  Field pmask = tr.spectral_copy(perturbation);
  if (tr.dom().dealias) tr.apply_dealias(pmask);
  const Field pphys = tr.physical_copy(pmask);
  const double pw = weighted_l2_norm(pphys, w);
  if (!(pw > 0.0)) {
    rep.exact_match = true;
    rep.ratios.assign(eps_ladder.size(), 0.0);
    return rep;
  }

  std::vector<std::vector<std::complex<double>>> base;
  {
    RecordHook keep = [&](double, const Field& u) { base.push_back(u.spec); };
    rep.base = run(tr, tr.spectral_copy(u0), cfg, nullptr, DiagnosticsConfig{}, keep);
  }

  const Field u0s = tr.spectral_copy(u0);
  const Field ps = tr.spectral_copy(perturbation);
  for (const double eps : eps_ladder) {
    if (eps == 0.0) {
      rep.exact_match = true;
      rep.ratios.push_back(0.0);
      continue;
    }
    Field u0e = make_spectral_field(tr.dom());
    for (std::size_t i = 0; i < u0e.spec.size(); ++i) {
      u0e.spec[i] = u0s.spec[i] + eps * ps.spec[i];
    }
    double sup = 0.0;
    std::size_t idx = 0;
    RecordHook compare = [&](double, const Field& u) {
      if (idx >= base.size()) return;
      Field d = make_spectral_field(tr.dom());
      for (std::size_t i = 0; i < d.spec.size(); ++i) d.spec[i] = u.spec[i] - base[idx][i];
      const Field dp = tr.physical_copy(d);
      sup = std::max(sup, weighted_l2_norm(dp, w) / (eps * pw));
      ++idx;
    };
    run(tr, std::move(u0e), cfg, nullptr, DiagnosticsConfig{}, compare);
    rep.ratios.push_back(sup);
  }
  return rep;
}

OrderReport temporal_order(const Transforms& tr, const Field& u0, SolverConfig cfg,
                           std::vector<double> dts, double dt_ref) {
  OrderReport rep;
  rep.dts = std::move(dts);
  if (rep.dts.size() < 2) throw UsageError("temporal order: need at least two dt values");

  auto final_state = [&](double dt) {
    SolverConfig c = cfg;
    c.dt = dt;
    c.snapshot_stride = static_cast<int>(std::max<long>(1, std::lround(cfg.T / dt)));
    Field fin = make_spectral_field(tr.dom());
    RecordHook keep = [&](double, const Field& u) { fin = u; };
    run(tr, tr.spectral_copy(u0), c, nullptr, DiagnosticsConfig{}, keep);
    return fin;
  };

  const Field ref = final_state(dt_ref);
  std::vector<double> lx, ly;
  for (const double dt : rep.dts) {
    const Field fin = final_state(dt);
    const double e = std::max(spectral_l2_distance(fin, ref), 1e-300);
    rep.errors.push_back(e);
    lx.push_back(std::log(dt));
    ly.push_back(std::log(e));
  }
  rep.slope = ols_slope(lx, ly);
  return rep;
}

}  // namespace zk
