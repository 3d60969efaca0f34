// Interaction potentials Phi (Newtonian / Bessel) and the chemotactic field
// Phi * rho.  The canonical realization is the resolvent of the Dirichlet
// Laplacian: Newtonian c_k = a_k / lambda_k, Bessel c_k = a_k / (1 + lambda_k),
// exact in the eigenbasis.  A direct free-space quadrature mode is kept as a
// cross-check of the boundary discrepancy.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "sks/field.hpp"

namespace sks {

enum class KernelKind { newtonian, bessel };
enum class KernelMode { resolvent, direct_quadrature };

struct KernelSpec {
  KernelKind kind = KernelKind::bessel;
  KernelMode mode = KernelMode::resolvent;
};

// Free-space Bessel kernel Phi(r) = int_0^inf (4 pi t)^{-d/2} exp(-r^2/(4t) - t) dt,
// integrated adaptively after t = u^2 (tail truncated at t = 40, where
// exp(-t) < 5e-18).  Singular at r = 0 for d >= 2.
inline double bessel_kernel_eval(double r, int d) {
  if (r < 0.0) throw std::domain_error("bessel_kernel_eval: r must be >= 0");
  if (d < 1 || d > 3) throw std::domain_error("bessel_kernel_eval: d must be 1, 2 or 3");
  if (r == 0.0 && d >= 2) throw std::domain_error("bessel_kernel_eval: kernel singular at r = 0 for d >= 2");

  auto integrand = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double t = u * u;
    const double expo = -r * r / (4.0 * t) - t;
    if (expo < -700.0) return 0.0;
    return 2.0 * u * std::pow(4.0 * kPi * t, -0.5 * d) * std::exp(expo);
  };

  // Adaptive Simpson with recursion on [a, b].
  std::function<double(double, double, double, double, double, double, int)> simpson =
      [&](double a, double b, double fa, double fm, double fb, double whole, int depth) -> double {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = integrand(lm), frm = integrand(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = left + right - whole;
    if (depth <= 0 || std::abs(err) < 1e-13 * (std::abs(left + right) + 1e-300) || std::abs(err) < 1e-16)
      return left + right + err / 15.0;
    return simpson(a, m, fa, flm, fm, left, depth - 1) + simpson(m, b, fm, frm, fb, right, depth - 1);
  };

  const double ub = std::sqrt(40.0);
  // Split at the turn-on scale u ~ r/2 so the adaptive pass sees it.
  std::vector<double> knots = {0.0, std::min(std::max(0.5 * r, 1e-4), 0.5 * ub), 1.0, ub};
  std::sort(knots.begin(), knots.end());
  double total = 0.0;
  for (size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i], b = knots[i + 1];
    if (!(b > a)) continue;
    const double fa = integrand(a), fb = integrand(b), fm = integrand(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    total += simpson(a, b, fa, fm, fb, whole, 60);
  }
  return total;
}

// Free-space kernel value for the direct-quadrature mode.
inline double free_space_kernel(KernelKind kind, double r, int d) {
  if (kind == KernelKind::bessel) return bessel_kernel_eval(r, d);
  if (d == 1) return -0.5 * r;            // -|x|/2: -(d^2/dx^2) Phi = delta
  return -std::log(r) / (2.0 * kPi);      // d == 2
}

inline Field interaction_field(const Domain& dom, const Field& rho, const KernelSpec& kernel) {
  if (kernel.mode == KernelMode::resolvent) {
    Field in = dom.to_spectral(rho);
    Field out = dom.zero_field();
    const auto& lam = dom.basis().eigenvalues;
    const double shift = (kernel.kind == KernelKind::bessel) ? 1.0 : 0.0;
    for (size_t k = 0; k < out.spec.size(); ++k) out.spec[k] = in.spec[k] / (shift + lam[k]);
    return out;
  }

  // Direct quadrature: c(x) = sum_y Phi(x - y) rho(y) h^d on the interior
  // grid, with the (integrable) kernel singularity dropped at y = x.
  Field in = dom.to_grid(rho);
  const int m = dom.grid_per_axis();
  const double h = dom.cell();
  const int d = dom.dim();
  Field out;
  out.grid.assign(dom.grid_size(), 0.0);
  const bool singular0 = (d >= 2);
  if (d == 1) {
    std::vector<double> table(2 * m - 1);
    for (int delta = -(m - 1); delta <= m - 1; ++delta)
      table[delta + m - 1] = free_space_kernel(kernel.kind, std::abs(delta) * h, 1);
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int j = 0; j < m; ++j) s += table[i - j + m - 1] * in.grid[j];
      out.grid[i] = s * h;
    }
  } else {
    std::vector<double> table(static_cast<size_t>(2 * m - 1) * (2 * m - 1), 0.0);
    for (int dx = -(m - 1); dx <= m - 1; ++dx)
      for (int dy = -(m - 1); dy <= m - 1; ++dy) {
        if (singular0 && dx == 0 && dy == 0) continue;
        const double r = h * std::sqrt(double(dx) * dx + double(dy) * dy);
        table[static_cast<size_t>(dx + m - 1) * (2 * m - 1) + (dy + m - 1)] =
            free_space_kernel(kernel.kind, r, 2);
      }
    for (int ix = 0; ix < m; ++ix)
      for (int iy = 0; iy < m; ++iy) {
        double s = 0.0;
        for (int jx = 0; jx < m; ++jx) {
          const double* row = &table[static_cast<size_t>(ix - jx + m - 1) * (2 * m - 1) + (m - 1)];
          const double* rrow = &in.grid[static_cast<size_t>(jx) * m];
          for (int jy = 0; jy < m; ++jy) s += row[iy - jy] * rrow[jy];
        }
        out.grid[static_cast<size_t>(ix) * m + iy] = s * h * h;
      }
  }
  out.grid_ok = true;
  dom.ensure_spec(out);
  return out;
}

// grad(Phi * rho), the drift field of the chemotactic flux.
inline GradField grad_interaction(const Domain& dom, const Field& rho, const KernelSpec& kernel) {
  return dom.gradient(interaction_field(dom, rho, kernel));
}

// max_x |grad Phi * rho| / ||rho||_{L^{m+1}}: the measured constant of the
// kernel bound, 0-homogeneous in rho.
inline double kernel_bound_ratio(const Domain& dom, const Field& rho, const KernelSpec& kernel, double m) {
  if (kernel.kind == KernelKind::newtonian && m + 1.0 < dom.dim())
    throw std::invalid_argument("kernel_bound_ratio: Newtonian bound needs m+1 >= d");
  if (kernel.kind == KernelKind::bessel && m + 1.0 <= 2.0)
    throw std::invalid_argument("kernel_bound_ratio: Bessel bound needs m+1 > 2");
  const double denom = dom.norm_lp(rho, m + 1.0);
  if (denom == 0.0) throw std::domain_error("kernel_bound_ratio: rho must be nonzero");
  return sup_magnitude(grad_interaction(dom, rho, kernel)) / denom;
}

}  // namespace sks
