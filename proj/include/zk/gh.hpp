#pragma once

#include <vector>

namespace zk {

// Truncated nonlinearity. For h = 0 this is exactly g(u) = u^2/2. For h in (0, 1]:
//
//   g_h(u) = int_0^u [ theta * eta(2 - h|theta|) + (2 sgn theta / h) * eta(h|theta| - 1) ] dtheta
//
// which is u^2/2 on |u| <= 1/h, has slope exactly 2/h beyond |u| >= 2/h, and satisfies
// |g_h'| <= min(2/h, 2|u|). The transition band [1/h, 2/h] has no closed form; it is
// tabulated on 4096 intervals (adaptive Simpson per knot) and evaluated by cubic
// Hermite interpolation with the analytic derivative at the knots.
class GhFunction {
 public:
  explicit GhFunction(double h);  // h in [0, 1]

  double h() const { return h_; }
  bool truncated() const { return h_ > 0.0; }

  double eval(double u) const;   // g_h(u); even in u
  double prime(double u) const;  // g_h'(u); odd, exact formula (no table)
  // int_0^u theta g_h'(theta) dtheta; odd. Equals u^3/3 wherever g_h is quadratic.
  double star(double u) const;

  // Independent evaluation straight from the defining integral (adaptive Simpson),
  // bypassing the table; used to audit table accuracy.
  double eval_by_quadrature(double u, double tol = 1e-13) const;

 private:
  double interp(const std::vector<double>& val, const std::vector<double>& der, double a) const;

  double h_ = 0.0;
  double lo_ = 0.0, hi_ = 0.0;  // 1/h, 2/h
  double step_ = 0.0;
  double C_ = 0.0;      // g_h(2/h)
  double starC_ = 0.0;  // star(2/h)
  std::vector<double> gv_, gd_, sv_, sd_;
};

}  // namespace zk
