#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "zk/diagnostics.hpp"
#include "zk/errors.hpp"
#include "zk/field.hpp"
#include "zk/linear.hpp"
#include "zk/rng.hpp"
#include "zk/transforms.hpp"

using namespace zk;

namespace {

const double kPi = std::numbers::pi;

Field fill(const Transforms& tr, const std::function<double(double, double, double)>& f) {
  const DomainSpec& dom = tr.dom();
  Field u = make_physical_field(dom);
  for (int j = 0; j < dom.Nx; ++j)
    for (int m = 0; m < dom.Ny; ++m)
      for (int n = 0; n < dom.Nz; ++n)
        u.phys[dom.index(j, m, n)] = f(dom.x(j), dom.y(m), dom.z(n));
  return u;
}

Field random_spectral(const Transforms& tr, std::uint64_t seed) {
  Field u = make_physical_field(tr.dom());
  const CounterRng rng(seed);
  for (std::size_t i = 0; i < u.phys.size(); ++i) u.phys[i] = rng.uniform_sym(i);
  tr.to_spectral(u);
  tr.apply_dealias(u);
  return u;
}

double distance(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.spec.size(); ++i) {
    const auto d = a.spec[i] - b.spec[i];
    s += d.real() * d.real() + d.imag() * d.imag();
  }
  return std::sqrt(s / (2.0 * a.dom.X));
}

}  // namespace

TEST_CASE("symbol values") {
  const std::complex<double> s1 = symbol(1.0, 2.0, {1.0, 0.0});
  CHECK(s1.real() == 0.0);
  CHECK(s1.imag() == doctest::Approx(2.0).epsilon(1e-15));  // 1 - 1 + 2

  const std::complex<double> s2 = symbol(1.0, 2.0, {0.0, 1.0});
  CHECK(s2.imag() == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(s2.real() == doctest::Approx(-3.0).epsilon(1e-15));  // -(xi^2 + lambda)

  CHECK(symbol(0.0, 5.0, {2.0, 0.0}) == std::complex<double>(0.0, 0.0));
  CHECK(symbol(-1.0, 2.0, {1.0, 0.0}).imag() == doctest::Approx(-2.0));
}

TEST_CASE("propagation: identity at t = 0, unitary without damping") {
  const DomainSpec dom{kPi, kPi, 2.0, 16, 6, 6, true};
  const Transforms tr(dom);
  Field u = random_spectral(tr, 7);
  const Field orig = u;
  propagate(tr, u, 0.0, {0.7, 0.3});
  CHECK(distance(u, orig) == 0.0);

  const double n0 = l2_norm(u);
  propagate(tr, u, 0.8, {0.7, 0.0});
  CHECK(std::abs(l2_norm(u) - n0) < 1e-13 * n0);

  propagate(tr, u, 0.5, {0.0, 0.4});
  CHECK(l2_norm(u) < n0);
  CHECK_THROWS_AS(propagate(tr, u, -1.0, {0.0, 0.0}), UsageError);
}

TEST_CASE("single mode rotates at the symbol phase") {
  const DomainSpec dom{kPi, kPi, 2.0, 16, 8, 8, true};
  const Transforms tr(dom);
  const double xi = dom.xi(1), lam = eigenvalue(dom, 1, 2);
  const LinearParams p{0.4, 0.0};
  Field u = fill(tr, [&](double x, double y, double z) {
    return std::cos(xi * x) * std::sin(y) * std::sin(2.0 * z);
  });
  tr.to_spectral(u);
  const double t = 0.37;
  propagate(tr, u, t, p);
  tr.to_physical(u);
  // phase xi^3 - b xi + xi lambda turns cos(xi x) into cos(xi x + phi t) per mode pair.
  const double phi = xi * xi * xi - p.b * xi + xi * lam;
  double worst = 0.0;
  for (int j = 0; j < dom.Nx; ++j)
    for (int m = 0; m < dom.Ny; ++m)
      for (int n = 0; n < dom.Nz; ++n) {
        const double want =
            std::cos(xi * dom.x(j) + phi * t) * std::sin(dom.y(m)) * std::sin(2.0 * dom.z(n));
        worst = std::max(worst, std::abs(u.phys[dom.index(j, m, n)] - want));
      }
  CHECK(worst < 1e-12);
}

TEST_CASE("semigroup property and damping factor") {
  const DomainSpec dom{1.5, 2.5, 3.0, 16, 6, 6, true};
  const Transforms tr(dom);
  const LinearParams p{0.3, 0.25};
  Field a = random_spectral(tr, 21);
  Field b = a;
  propagate(tr, a, 0.7, p);
  propagate(tr, b, 0.3, p);
  propagate(tr, b, 0.4, p);
  CHECK(distance(a, b) < 1e-12 * l2_norm(a));

  // single mode decays by exactly exp(-delta (xi^2 + lambda) t).
  const double xi = dom.xi(2), lam = eigenvalue(dom, 1, 1);
  Field u = fill(tr, [&](double x, double y, double z) {
    return std::cos(xi * x) * std::sin(kPi * y / dom.L1) * std::sin(kPi * z / dom.L2);
  });
  tr.to_spectral(u);
  const double n0 = l2_norm(u);
  propagate(tr, u, 0.6, p);
  const double want = n0 * std::exp(-p.delta * (xi * xi + lam) * 0.6);
  CHECK(std::abs(l2_norm(u) - want) < 1e-12 * want);
}

TEST_CASE("propagation commutes with x translation") {
  const DomainSpec dom{kPi, kPi, 2.0, 32, 6, 6, true};
  const Transforms tr(dom);
  const LinearParams p{0.5, 0.1};
  Field u = random_spectral(tr, 33);

  // translate by 5 grid cells: multiply mode k by exp(-i xi_k s).
  const double s = 5.0 * dom.dx();
  auto translate = [&](Field& v) {
    for (int k = 0; k < dom.Nx; ++k) {
      const std::complex<double> ph = std::exp(std::complex<double>(0.0, -dom.xi(k) * s));
      for (int m = 0; m < dom.Ny; ++m)
        for (int n = 0; n < dom.Nz; ++n) v.spec[dom.index(k, m, n)] *= ph;
    }
  };
  Field a = u;
  translate(a);
  propagate(tr, a, 0.9, p);
  Field b = u;
  propagate(tr, b, 0.9, p);
  translate(b);
  CHECK(distance(a, b) < 1e-12 * l2_norm(a));
}

TEST_CASE("duhamel reproduces the closed form for static forcing") {
  const DomainSpec dom{kPi, kPi, 2.0, 16, 6, 6, true};
  const Transforms tr(dom);
  const LinearParams p{0.2, 0.35};
  // low modes and a short horizon keep |s| t small enough for the fixed-order
  // quadrature to resolve the oscillatory kernel to machine accuracy.
  Field f0 = random_band_limited(tr, 2, 2, 2, 44);
  Field u = make_spectral_field(dom);  // zero initial data
  const double t = 0.05;
  TimeField forcing = [&](double) { return f0; };
  duhamel_apply(tr, u, t, p, forcing, 12);

  // per-mode: u = f_hat (e^{st} - 1)/s.
  Field want = f0;
  for (int k = 0; k < dom.Nx; ++k)
    for (int m = 0; m < dom.Ny; ++m)
      for (int n = 0; n < dom.Nz; ++n) {
        const std::size_t i = dom.index(k, m, n);
        std::complex<double> s;
        if (k == dom.Nx / 2) {
          s = std::complex<double>(-p.delta * (dom.xi(k) * dom.xi(k) +
                                               eigenvalue(dom, m + 1, n + 1)), 0.0);
        } else {
          s = symbol(dom.xi(k), eigenvalue(dom, m + 1, n + 1), p);
        }
        want.spec[i] *= (std::exp(s * t) - 1.0) / s;
      }
  CHECK(distance(u, want) < 1e-10 * l2_norm(want));
}

TEST_CASE("picard with g = 0 matches duhamel after one iterate") {
  const DomainSpec dom{kPi, kPi, 2.0, 16, 6, 6, true};
  const Transforms tr(dom);
  const LinearParams p{0.0, 0.3};
  const Field u0 = random_spectral(tr, 55);
  Field f0 = random_spectral(tr, 56);
  const double t = 0.4;
  TimeField forcing = [&](double tau) {
    Field g = f0;
    for (auto& c : g.spec) c *= std::cos(3.0 * tau);
    return g;
  };
  Field d = u0;
  duhamel_apply(tr, d, t, p, forcing, 12);
  const PicardResult pr = picard_iterate(tr, u0, t, p, nullptr, &forcing, 3, 12);
  CHECK(distance(pr.final, d) < 1e-12 * l2_norm(d));
  for (std::size_t i = 1; i < pr.diffs.size(); ++i) CHECK(pr.diffs[i] < 1e-13);
}

TEST_CASE("picard contracts on a short nonlinear interval") {
  const DomainSpec dom{kPi, kPi, 2.0, 16, 8, 8, true};
  const Transforms tr(dom);
  const LinearParams p{0.0, 0.2};
  const GhFunction g(0.2);
  Field u0 = fill(tr, [&](double x, double y, double z) {
    return 0.8 * std::exp(-x * x) * std::sin(y) * std::sin(z);
  });
  tr.to_spectral(u0);
  tr.apply_dealias(u0);
  const PicardResult pr = picard_iterate(tr, u0, 0.01, p, &g, nullptr, 5);
  REQUIRE(pr.diffs.size() >= 3);
  for (std::size_t i = 1; i < pr.diffs.size(); ++i) CHECK(pr.diffs[i] < pr.diffs[i - 1]);
  CHECK(pr.diffs.back() < 1e-3 * pr.diffs.front());
}

TEST_CASE("picard reports divergence instead of returning garbage") {
  const DomainSpec dom{kPi, kPi, 2.0, 16, 8, 8, true};
  const Transforms tr(dom);
  const GhFunction g(0.5);
  // weak data under a strong static forcing: the first corrected iterate is
  // orders of magnitude above the linear baseline, so the iteration cannot
  // contract on this horizon and the tenfold growth guard must fire.
  const double xi1 = dom.xi(1);
  Field u0 = fill(tr, [&](double x, double y, double z) {
    return 1e-3 * std::cos(xi1 * x) * std::sin(y) * std::sin(z);
  });
  Field fstat = fill(tr, [&](double x, double y, double z) {
    return 50.0 * std::cos(xi1 * x) * std::sin(y) * std::sin(z);
  });
  tr.to_spectral(u0);
  tr.apply_dealias(u0);
  tr.to_spectral(fstat);
  tr.apply_dealias(fstat);
  TimeField forcing = [&](double) { return fstat; };
  CHECK_THROWS_AS(picard_iterate(tr, u0, 1.0, {0.0, 0.5}, &g, &forcing, 3), ConvergenceError);
}

TEST_CASE("picard validates its preconditions") {
  const DomainSpec dom{kPi, kPi, 2.0, 16, 6, 6, true};
  const Transforms tr(dom);
  const Field u0 = random_spectral(tr, 60);
  CHECK_THROWS_AS(picard_iterate(tr, u0, 0.1, {0.0, 0.0}, nullptr, nullptr, 3), UsageError);
  CHECK_THROWS_AS(picard_iterate(tr, u0, 0.0, {0.0, 0.5}, nullptr, nullptr, 3), UsageError);
  const LinearParams neg{0.0, -0.5}, big{0.0, 1.5};
  CHECK_THROWS_AS(neg.validate(), DomainError);
  CHECK_THROWS_AS(big.validate(), DomainError);
}
