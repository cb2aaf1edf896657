#include "zk/gh.hpp"

#include <cmath>
#include <string>

#include "zk/errors.hpp"
#include "zk/quadrature.hpp"
#include "zk/weights.hpp"

namespace zk {

namespace {
constexpr int kIntervals = 4096;

double integrand(double theta, double h) {
  const double s = std::abs(theta);
  const double v = s * eta(2.0 - h * s) + (2.0 / h) * eta(h * s - 1.0);
  return theta >= 0.0 ? v : -v;
}
}  // namespace

GhFunction::GhFunction(double h) : h_(h) {
  if (!(h >= 0.0 && h <= 1.0)) {
    throw DomainError("g_h: h must be in [0, 1], got " + std::to_string(h));
  }
  if (h_ == 0.0) return;

  lo_ = 1.0 / h_;
  hi_ = 2.0 / h_;
  step_ = (hi_ - lo_) / kIntervals;
  gv_.resize(kIntervals + 1);
  gd_.resize(kIntervals + 1);
  sv_.resize(kIntervals + 1);
  sd_.resize(kIntervals + 1);
  gv_[0] = 0.5 * lo_ * lo_;
  sv_[0] = lo_ * lo_ * lo_ / 3.0;
  auto gp = [this](double t) { return integrand(t, h_); };
  auto sp = [this](double t) { return t * integrand(t, h_); };
  for (int i = 0; i <= kIntervals; ++i) {
    const double x = lo_ + i * step_;
    gd_[i] = gp(x);
    sd_[i] = sp(x);
    if (i > 0) {
      const double a = lo_ + (i - 1) * step_;
      gv_[i] = gv_[i - 1] + adaptive_simpson(gp, a, x, 1e-15);
      sv_[i] = sv_[i - 1] + adaptive_simpson(sp, a, x, 1e-15);
    }
  }
  C_ = gv_[kIntervals];
  starC_ = sv_[kIntervals];
}

double GhFunction::interp(const std::vector<double>& val, const std::vector<double>& der,
                          double a) const {
  int i = static_cast<int>((a - lo_) / step_);
  if (i < 0) i = 0;
  if (i >= kIntervals) i = kIntervals - 1;
  const double x0 = lo_ + i * step_;
  const double t = (a - x0) / step_;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * val[i] + h10 * step_ * der[i] + h01 * val[i + 1] + h11 * step_ * der[i + 1];
}

double GhFunction::eval(double u) const {
  if (h_ == 0.0) return 0.5 * u * u;
  const double a = std::abs(u);
  if (a <= lo_) return 0.5 * u * u;
  if (a >= hi_) return C_ + (2.0 / h_) * (a - hi_);
  return interp(gv_, gd_, a);
}

double GhFunction::prime(double u) const {
  if (h_ == 0.0) return u;
  const double a = std::abs(u);
  double v;
  if (a <= lo_) {
    v = a;
  } else if (a >= hi_) {
    v = 2.0 / h_;
  } else {
    v = a * eta(2.0 - h_ * a) + (2.0 / h_) * eta(h_ * a - 1.0);
  }
  return u >= 0.0 ? v : -v;
}

double GhFunction::star(double u) const {
  if (h_ == 0.0) return u * u * u / 3.0;
  const double a = std::abs(u);
  double v;
  if (a <= lo_) {
    v = a * a * a / 3.0;
  } else if (a >= hi_) {
    v = starC_ + (a * a - hi_ * hi_) / h_;
  } else {
    v = interp(sv_, sd_, a);
  }
  return u >= 0.0 ? v : -v;
}

double GhFunction::eval_by_quadrature(double u, double tol) const {
  if (h_ == 0.0) return 0.5 * u * u;
  const double a = std::abs(u);
  if (a <= lo_) return 0.5 * u * u;
  auto gp = [this](double t) { return integrand(t, h_); };
  const double band_top = std::min(a, hi_);
  double v = 0.5 * lo_ * lo_ + adaptive_simpson(gp, lo_, band_top, tol);
  if (a > hi_) v += (2.0 / h_) * (a - hi_);
  return v;
}

}  // namespace zk
