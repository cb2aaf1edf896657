#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "zk/errors.hpp"

namespace zk {

struct QuadNodes {
  std::vector<double> x, w;  // nodes and weights on [0, 1]
};

// Gauss-Legendre nodes by Newton iteration on the Legendre recurrence.
inline QuadNodes gauss_legendre01(int n) {
  if (n < 1 || n > 256) throw DomainError("gauss_legendre01: order must be in [1, 256]");
  QuadNodes q;
  q.x.resize(n);
  q.w.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev-angle initial guess for root i (descending in (-1,1)).
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (t * p1 - p0) / (t * t - 1.0);
    q.x[i] = 0.5 * (1.0 + t);
    q.w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
  return q;
}

// Adaptive Simpson with absolute tolerance.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, int max_depth = 48) {
  struct Rec {
    static double go(const std::function<double(double)>& f, double a, double b, double fa,
                     double fm, double fb, double whole, double tol, int depth) {
      const double m = 0.5 * (a + b);
      const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const double flm = f(lm), frm = f(rm);
      const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      const double delta = left + right - whole;
      if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
      }
      return go(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
             go(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
  };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return Rec::go(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace zk
