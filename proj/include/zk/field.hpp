#pragma once

#include <complex>
#include <vector>

#include "zk/domain.hpp"

namespace zk {

enum class Rep { Physical, Spectral };

// A scalar field in exactly one representation at a time. `phys` holds collocation
// values (x slowest, z fastest); `spec` holds coefficients indexed (k, l1-1, l2-1) in
// the same layout, where slot k carries xi_k = pi*signed_k/X and the transverse slots
// carry the orthonormal sine basis.
struct Field {
  DomainSpec dom;
  Rep rep = Rep::Physical;
  std::vector<double> phys;
  std::vector<std::complex<double>> spec;
};

Field make_physical_field(const DomainSpec& dom);
Field make_spectral_field(const DomainSpec& dom);

// sqrt( sum u^2 dx dy dz ) in physical rep, or the Parseval-equivalent spectral sum
// sqrt( sum |u_hat|^2 / (2X) ).
double l2_norm(const Field& u);
double max_abs(const Field& u);  // physical rep only

}  // namespace zk
