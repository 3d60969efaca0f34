// Box domain (0,L)^d with homogeneous Dirichlet conditions and the
// eigensystem of -Laplace on it: e_k = prod_a sqrt(2/L) sin(k_a pi x_a / L),
// lambda_k = (pi/L)^2 * sum k_a^2.  Dimensions 1 and 2 are supported.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace sks {

inline constexpr double kPi = std::numbers::pi;

struct DomainSpec {
  int dim = 1;          // d in {1,2}
  double length = kPi;  // side length L of the box, per axis
  int grid_n = 128;     // N: subintervals per axis; interior grid has N-1 points
  int trunc_k = 127;    // K: retained sine modes per axis, 1 <= K <= N-1

  void validate() const {
    if (dim != 1 && dim != 2)
      throw std::invalid_argument("domain: dim must be 1 or 2");
    if (!(length > 0.0))
      throw std::invalid_argument("domain: length must be positive");
    if (grid_n < 16 || (grid_n & (grid_n - 1)) != 0)
      throw std::invalid_argument("domain: grid_n must be a power of two >= 16");
    if (trunc_k < 1 || trunc_k > grid_n - 1)
      throw std::invalid_argument("domain: trunc_k must satisfy 1 <= K <= N-1");
  }
};

// Flat mode ordering is row-major over the multi-index (j,k), j slow, both
// 1-based: flat = (j-1)*K + (k-1).  A separate permutation sorted by
// (eigenvalue, flat index) is kept for noise-mode selection, where "first
// K_W modes" has to mean the smoothest ones.
struct Basis {
  DomainSpec spec;
  std::vector<double> eigenvalues;  // size K^d, row-major flat order
  std::vector<int> sorted_modes;    // flat indices, ascending (lambda, flat)

  int mode_count() const { return static_cast<int>(eigenvalues.size()); }

  std::array<int, 2> multi_index(int flat) const {
    if (spec.dim == 1) return {flat + 1, 0};
    return {flat / spec.trunc_k + 1, flat % spec.trunc_k + 1};
  }

  int flat_index(int j, int k = 0) const {
    if (spec.dim == 1) return j - 1;
    return (j - 1) * spec.trunc_k + (k - 1);
  }

  double eigenvalue(int flat) const { return eigenvalues[flat]; }

  // Pointwise evaluation of e_flat; used by tests and initial data, not by
  // the transform path.
  double eval(int flat, double x, double y = 0.0) const {
    const double L = spec.length;
    const double amp = std::sqrt(2.0 / L);
    const auto jk = multi_index(flat);
    double v = amp * std::sin(jk[0] * kPi * x / L);
    if (spec.dim == 2) v *= amp * std::sin(jk[1] * kPi * y / L);
    return v;
  }
};

inline Basis build_basis(const DomainSpec& spec) {
  spec.validate();
  Basis b;
  b.spec = spec;
  const int K = spec.trunc_k;
  const double scale = (kPi / spec.length) * (kPi / spec.length);
  if (spec.dim == 1) {
    b.eigenvalues.resize(K);
    for (int k = 1; k <= K; ++k) b.eigenvalues[k - 1] = scale * k * k;
  } else {
    b.eigenvalues.resize(static_cast<size_t>(K) * K);
    for (int j = 1; j <= K; ++j)
      for (int k = 1; k <= K; ++k)
        b.eigenvalues[(j - 1) * K + (k - 1)] = scale * (j * j + k * k);
  }
  b.sorted_modes.resize(b.eigenvalues.size());
  for (size_t i = 0; i < b.sorted_modes.size(); ++i) b.sorted_modes[i] = static_cast<int>(i);
  std::sort(b.sorted_modes.begin(), b.sorted_modes.end(), [&](int a, int c) {
    if (b.eigenvalues[a] != b.eigenvalues[c]) return b.eigenvalues[a] < b.eigenvalues[c];
    return a < c;
  });
  return b;
}

}  // namespace sks
