#include "zk/weights.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zk/errors.hpp"
#include "zk/quadrature.hpp"

namespace zk {

namespace {
double phi(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
}  // namespace

double eta(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = phi(x), b = phi(1.0 - x);
  return a / (a + b);
}

void WeightSpec::validate() const {
  if (kind == WeightKind::One) {
    if (derivative) throw DomainError("weight: derivative of the constant weight is degenerate");
    return;
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DomainError("weight: alpha must be in [0, 1], got " + std::to_string(alpha));
  }
  if (kind == WeightKind::KappaAlphaBeta && !(beta > 0.0 && beta <= 1.0)) {
    throw DomainError("weight: beta must be in (0, 1], got " + std::to_string(beta));
  }
  if (kind == WeightKind::Exp2Alpha && derivative && alpha == 0.0) {
    throw DomainError("weight: derivative of exp(0) is degenerate");
  }
}

namespace {
struct EndData {
  double f0, d0, dd0;  // at x = -1
  double f1, d1, dd1;  // at x = 0
};

EndData kappa_ends(double alpha, double beta) {
  EndData e;
  e.f0 = std::exp(-2.0 * beta);
  e.d0 = 2.0 * beta * e.f0;
  e.dd0 = 4.0 * beta * beta * e.f0;
  if (alpha > 0.0) {
    e.f1 = 1.0;
    e.d1 = 2.0 * alpha;
    e.dd1 = 2.0 * alpha * (2.0 * alpha - 1.0);
  } else {
    e.f1 = 1.0;
    e.d1 = 0.5;
    e.dd1 = -0.75;
  }
  return e;
}

std::array<double, 6> quintic_coeffs(const EndData& e) {
  const double df = e.f1 - e.f0;
  return {e.f0,
          e.d0,
          0.5 * e.dd0,
          10.0 * df - 6.0 * e.d0 - 4.0 * e.d1 - 1.5 * e.dd0 + 0.5 * e.dd1,
          -15.0 * df + 8.0 * e.d0 + 7.0 * e.d1 + 1.5 * e.dd0 - e.dd1,
          6.0 * df - 3.0 * e.d0 - 3.0 * e.d1 - 0.5 * e.dd0 + 0.5 * e.dd1};
}

double poly_eval(const std::array<double, 6>& a, double t) {
  double r = 0.0;
  for (int i = 5; i >= 0; --i) r = r * t + a[i];
  return r;
}
double poly_d1(const std::array<double, 6>& a, double t) {
  double r = 0.0;
  for (int i = 5; i >= 1; --i) r = r * t + i * a[i];
  return r;
}
double poly_d2(const std::array<double, 6>& a, double t) {
  double r = 0.0;
  for (int i = 5; i >= 2; --i) r = r * t + i * (i - 1) * a[i];
  return r;
}

double cubic_eval(const std::array<double, 4>& c, double t) {
  return ((c[3] * t + c[2]) * t + c[1]) * t + c[0];
}
double cubic_d1(const std::array<double, 4>& c, double t) {
  return (3.0 * c[3] * t + 2.0 * c[2]) * t + c[1];
}
}  // namespace

Weight::Weight(const WeightSpec& spec) : spec_(spec) {
  spec_.validate();
  if (spec_.kind == WeightKind::One || spec_.kind == WeightKind::Exp2Alpha) return;

  bridged_ = true;
  rho_shift_ = (spec_.kind == WeightKind::RhoAlpha) ? 1.0 : 0.0;
  const double beta = (spec_.kind == WeightKind::RhoAlpha) ? 1.0 : spec_.beta;
  const EndData e = kappa_ends(spec_.alpha, beta);
  fleft_ = e.f0;
  poly_ = quintic_coeffs(e);

  // Accept the quintic only if strictly increasing on the bridge.
  double mind = poly_d1(poly_, 0.0);
  for (int i = 1; i <= 4096; ++i) mind = std::min(mind, poly_d1(poly_, i / 4096.0));
  const double scale = std::max(e.d0, e.d1);
  quintic_ = mind > 1e-10 * scale;
  if (quintic_) return;

  // Fallback: psi' = exp(cubic Hermite of log psi' + c * t^2 (1-t)^2), with c solved
  // so the bridge integral matches the value gap.
  const double L0 = std::log(e.d0), L1 = std::log(e.d1);
  const double s0 = e.dd0 / e.d0, s1 = e.dd1 / e.d1;
  logq_ = {L0, s0, 3.0 * (L1 - L0) - 2.0 * s0 - s1, -2.0 * (L1 - L0) + s0 + s1};

  static const QuadNodes gl = gauss_legendre01(32);
  auto integral = [&](double c) {
    double s = 0.0;
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      const double t = gl.x[i];
      const double bump = t * t * (1.0 - t) * (1.0 - t);
      s += gl.w[i] * std::exp(cubic_eval(logq_, t) + c * bump);
    }
    return s;
  };
  const double target = e.f1 - e.f0;
  double lo = 0.0, hi = 0.0;
  if (integral(0.0) < target) {
    hi = 1.0;
    while (integral(hi) < target) {
      hi *= 2.0;
      if (hi > 1024.0) throw ConvergenceError("weight bridge: integral match diverged");
    }
  } else {
    lo = -1.0;
    while (integral(lo) > target) {
      lo *= 2.0;
      if (lo < -1024.0) throw ConvergenceError("weight bridge: integral match diverged");
    }
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (integral(mid) < target ? lo : hi) = mid;
  }
  bump_ = 0.5 * (lo + hi);
}

double Weight::base_value(double x) const {
  switch (spec_.kind) {
    case WeightKind::One:
      return 1.0;
    case WeightKind::Exp2Alpha:
      return std::exp(2.0 * spec_.alpha * x);
    default:
      break;
  }
  const double alpha = spec_.alpha;
  const double beta = (spec_.kind == WeightKind::RhoAlpha) ? 1.0 : spec_.beta;
  double v;
  if (x <= -1.0) {
    v = std::exp(2.0 * beta * x);
  } else if (x >= 0.0) {
    v = alpha > 0.0 ? std::pow(1.0 + x, 2.0 * alpha) : 2.0 - 1.0 / std::sqrt(1.0 + x);
  } else if (quintic_) {
    v = poly_eval(poly_, x + 1.0);
  } else {
    const double t = x + 1.0;
    static const QuadNodes gl = gauss_legendre01(32);
    double s = 0.0;
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      const double u = t * gl.x[i];
      const double bump = u * u * (1.0 - u) * (1.0 - u);
      s += gl.w[i] * std::exp(cubic_eval(logq_, u) + bump_ * bump);
    }
    v = fleft_ + t * s;
  }
  return v + rho_shift_;
}

double Weight::base_d1(double x) const {
  switch (spec_.kind) {
    case WeightKind::One:
      return 0.0;
    case WeightKind::Exp2Alpha:
      return 2.0 * spec_.alpha * std::exp(2.0 * spec_.alpha * x);
    default:
      break;
  }
  const double alpha = spec_.alpha;
  const double beta = (spec_.kind == WeightKind::RhoAlpha) ? 1.0 : spec_.beta;
  if (x <= -1.0) return 2.0 * beta * std::exp(2.0 * beta * x);
  if (x >= 0.0) {
    return alpha > 0.0 ? 2.0 * alpha * std::pow(1.0 + x, 2.0 * alpha - 1.0)
                       : 0.5 * std::pow(1.0 + x, -1.5);
  }
  const double t = x + 1.0;
  if (quintic_) return poly_d1(poly_, t);
  const double bump = t * t * (1.0 - t) * (1.0 - t);
  return std::exp(cubic_eval(logq_, t) + bump_ * bump);
}

double Weight::base_d2(double x) const {
  switch (spec_.kind) {
    case WeightKind::One:
      return 0.0;
    case WeightKind::Exp2Alpha: {
      const double a2 = 2.0 * spec_.alpha;
      return a2 * a2 * std::exp(a2 * x);
    }
    default:
      break;
  }
  const double alpha = spec_.alpha;
  const double beta = (spec_.kind == WeightKind::RhoAlpha) ? 1.0 : spec_.beta;
  if (x <= -1.0) return 4.0 * beta * beta * std::exp(2.0 * beta * x);
  if (x >= 0.0) {
    return alpha > 0.0 ? 2.0 * alpha * (2.0 * alpha - 1.0) * std::pow(1.0 + x, 2.0 * alpha - 2.0)
                       : -0.75 * std::pow(1.0 + x, -2.5);
  }
  const double t = x + 1.0;
  if (quintic_) return poly_d2(poly_, t);
  const double bump = t * t * (1.0 - t) * (1.0 - t);
  const double dbump = 2.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
  const double q = cubic_eval(logq_, t) + bump_ * bump;
  return (cubic_d1(logq_, t) + bump_ * dbump) * std::exp(q);
}

double Weight::value(double x) const { return spec_.derivative ? base_d1(x) : base_value(x); }

double Weight::d1(double x) const { return spec_.derivative ? base_d2(x) : base_d1(x); }

double Weight::d2(double x) const {
  if (spec_.derivative) throw UsageError("weight: second derivative of a derivative weight");
  return base_d2(x);
}

double Weight::d3(double x) const {
  if (spec_.derivative) throw UsageError("weight: third derivative of a derivative weight");
  switch (spec_.kind) {
    case WeightKind::One:
      return 0.0;
    case WeightKind::Exp2Alpha: {
      const double a2 = 2.0 * spec_.alpha;
      return a2 * a2 * a2 * std::exp(a2 * x);
    }
    default:
      break;
  }
  if (x > -1.0 && x < 0.0) {
    throw UsageError("weight: psi''' is not defined on the bridge interval");
  }
  const double alpha = spec_.alpha;
  const double beta = (spec_.kind == WeightKind::RhoAlpha) ? 1.0 : spec_.beta;
  if (x <= -1.0) return 8.0 * beta * beta * beta * std::exp(2.0 * beta * x);
  return alpha > 0.0 ? 2.0 * alpha * (2.0 * alpha - 1.0) * (2.0 * alpha - 2.0) *
                           std::pow(1.0 + x, 2.0 * alpha - 3.0)
                     : 1.875 * std::pow(1.0 + x, -3.5);
}

double admissibility_ratio(const Weight& w, double lo, double hi, int samples) {
  if (!(hi > lo) || samples < 2) throw DomainError("admissibility_ratio: bad sampling window");
  double r = -1e300;
  for (int i = 0; i < samples; ++i) {
    const double x = lo + (hi - lo) * i / (samples - 1);
    r = std::max(r, w.d1(x) / w.value(x));
  }
  return r;
}

namespace {
double weighted_sum_sq(const Field& u, const Weight& w, double xmax) {
  if (u.rep != Rep::Physical) throw UsageError("weighted_l2_norm: field must be physical");
  const DomainSpec& dom = u.dom;
  const std::size_t plane = static_cast<std::size_t>(dom.Ny) * dom.Nz;
  double s = 0.0;
  for (int j = 0; j < dom.Nx; ++j) {
    if (dom.x(j) > xmax) continue;
    const double wj = w.value(dom.x(j));
    const double* p = u.phys.data() + j * plane;
    for (std::size_t i = 0; i < plane; ++i) s += p[i] * p[i] * wj;
  }
  return s * dom.cell();
}
}  // namespace

double weighted_l2_norm(const Field& u, const Weight& w) {
  return std::sqrt(weighted_sum_sq(u, w, 1e300));
}

double weighted_l2_norm_window(const Field& u, const Weight& w, double xmax) {
  return std::sqrt(weighted_sum_sq(u, w, xmax));
}

namespace {
double weighted_h1_sq(const Transforms& tr, const Field& u, const Weight& w, double xmax) {
  const auto li = tr.line_integrals(u);
  const DomainSpec& dom = tr.dom();
  double s = 0.0;
  for (int j = 0; j < dom.Nx; ++j) {
    if (dom.x(j) > xmax) continue;
    s += w.value(dom.x(j)) * (li.ux2[j] + li.uy2[j] + li.uz2[j]);
  }
  return s * dom.dx();
}
}  // namespace

double weighted_h1_seminorm(const Transforms& tr, const Field& u, const Weight& w) {
  return std::sqrt(weighted_h1_sq(tr, u, w, 1e300));
}

double weighted_h1_seminorm_window(const Transforms& tr, const Field& u, const Weight& w,
                                   double xmax) {
  return std::sqrt(weighted_h1_sq(tr, u, w, xmax));
}

double local_smoothing_lambda(const DomainSpec& dom, const std::vector<double>& times,
                              const std::vector<std::vector<double>>& grad2_lines) {
  if (times.size() < 2) throw UsageError("local_smoothing_lambda: need at least two snapshots");
  if (times.size() != grad2_lines.size()) {
    throw UsageError("local_smoothing_lambda: times and snapshots disagree");
  }
  const int Nx = dom.Nx;
  std::vector<double> td(Nx, 0.0);
  for (std::size_t s = 0; s + 1 < times.size(); ++s) {
    const double dt = times[s + 1] - times[s];
    if (!(dt > 0.0)) throw UsageError("local_smoothing_lambda: times must increase");
    if (static_cast<int>(grad2_lines[s].size()) != Nx ||
        static_cast<int>(grad2_lines[s + 1].size()) != Nx) {
      throw UsageError("local_smoothing_lambda: snapshot size mismatch");
    }
    for (int j = 0; j < Nx; ++j) {
      td[j] += 0.5 * dt * (grad2_lines[s][j] + grad2_lines[s + 1][j]);
    }
  }
  const int W = std::min(Nx, std::max(1, static_cast<int>(std::ceil(1.0 / dom.dx() - 1e-12))));
  double best = 0.0;
  for (int j = 0; j < Nx; ++j) {
    double s = 0.0;
    for (int i = 0; i < W; ++i) s += td[(j + i) % Nx];
    best = std::max(best, s * dom.dx());
  }
  return best;
}

}  // namespace zk
