#include "zk/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "zk/errors.hpp"

namespace zk {

void DomainSpec::validate() const {
  if (!(L1 > 0.0) || !(L2 > 0.0)) {
    throw DomainError("domain: transverse extents L1, L2 must be positive, got L1=" +
                      std::to_string(L1) + " L2=" + std::to_string(L2));
  }
  if (!(X > 0.0)) {
    throw DomainError("domain: half-length X must be positive, got X=" + std::to_string(X));
  }
  if (Nx < 8 || Nx % 2 != 0) {
    throw DomainError("domain: Nx must be even and >= 8, got Nx=" + std::to_string(Nx));
  }
  if (Ny < 4 || Nz < 4) {
    throw DomainError("domain: Ny, Nz must be >= 4, got Ny=" + std::to_string(Ny) +
                      " Nz=" + std::to_string(Nz));
  }
}

double DomainSpec::xi(int k) const { return std::numbers::pi * signed_k(k) / X; }

double DomainSpec::xi_max_dealiased() const {
  const int kmax = dealias ? Nx / 3 : Nx / 2;
  return std::numbers::pi * kmax / X;
}

double eigenvalue(const DomainSpec& dom, int l1, int l2) {
  if (l1 < 1 || l2 < 1) {
    throw DomainError("eigenvalue: mode indices must be >= 1, got l1=" + std::to_string(l1) +
                      " l2=" + std::to_string(l2));
  }
  const double pi = std::numbers::pi;
  return pi * pi * (static_cast<double>(l1) * l1 / (dom.L1 * dom.L1) +
                    static_cast<double>(l2) * l2 / (dom.L2 * dom.L2));
}

std::vector<TransverseMode> enumerate_modes(const DomainSpec& dom, int count) {
  dom.validate();
  if (count < 1) throw DomainError("enumerate_modes: count must be >= 1");
  std::vector<TransverseMode> all;
  all.reserve(static_cast<std::size_t>(dom.Ny) * dom.Nz);
  for (int l1 = 1; l1 <= dom.Ny; ++l1)
    for (int l2 = 1; l2 <= dom.Nz; ++l2)
      all.push_back({l1, l2, eigenvalue(dom, l1, l2)});
  std::sort(all.begin(), all.end(), [](const TransverseMode& a, const TransverseMode& b) {
    if (a.lambda != b.lambda) return a.lambda < b.lambda;
    if (a.l1 != b.l1) return a.l1 < b.l1;
    return a.l2 < b.l2;
  });
  if (count < static_cast<int>(all.size())) all.resize(count);
  return all;
}

}  // namespace zk
