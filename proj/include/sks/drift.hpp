// The two drift pieces of the model and their frozen combination
//   A(rho)      = Lap(|rho|^{m-1} rho) - chi div(rho grad Phi * rho)
//   Abar(rho;xi) = Lap(|rho|^{m-1} rho) - chi div(xi  grad Phi * xi)
// plus numerical probes of the monotonicity / coercivity structure the
// variational solvability rests on.
#pragma once

#include <cmath>
#include <stdexcept>

#include "sks/kernels.hpp"
#include "sks/noise.hpp"

namespace sks {

struct ModelParams {
  double m = 3.0;    // diffusion exponent, m >= 1
  double chi = 0.5;  // chemotactic sensitivity, >= 0
  KernelSpec kernel;
  NoiseSpec noise;
  bool porous_enabled = true;  // test hook: drops the diffusion term entirely

  // m below 3 leaves the regime the global existence result covers; callers
  // surface this as a warning, not an error.
  bool below_theorem_regime() const { return m < 3.0; }

  void validate(int dim) const {
    if (!(m >= 1.0)) throw std::invalid_argument("model: m must be >= 1");
    if (chi < 0.0) throw std::invalid_argument("model: chi must be >= 0");
    noise.validate(dim);
  }
};

inline double signed_power(double v, double m) {
  if (m == 1.0) return v;
  const double a = std::pow(std::abs(v), m);
  return v < 0.0 ? -a : a;
}

// P_K [ |rho|^{m-1} rho ], evaluated on the oversampled grid.
inline Field porous_power(const Domain& dom, const Field& rho, double m) {
  if (!(m >= 1.0)) throw std::invalid_argument("porous_power: m must be >= 1");
  if (m == 1.0) return dom.to_spectral(rho);
  return dom.project_pointwise(dom.to_spectral(rho), [m](double v) { return signed_power(v, m); });
}

// Lap(|rho|^{m-1} rho) in spectral form.
inline Field porous_drift(const Domain& dom, const Field& rho, double m) {
  return dom.laplacian(porous_power(dom, rho, m));
}

// -chi div(xi grad Phi * xi).
inline Field chemo_drift(const Domain& dom, const Field& xi, double chi, const KernelSpec& kernel) {
  if (chi == 0.0) return dom.zero_field();
  Field xs = dom.to_spectral(xi);
  Field c = interaction_field(dom, xs, kernel);
  return dom.scaled(-chi, dom.divergence_of_gradient_product(xs, c));
}

// Drift of the auxiliary (frozen-chemotaxis) model; with xi = rho it is the
// full nonlinear drift.
inline Field frozen_drift(const Domain& dom, const Field& rho, const Field& xi, const ModelParams& p) {
  Field chemo = chemo_drift(dom, xi, p.chi, p.kernel);
  if (!p.porous_enabled) return chemo;
  Field por = porous_drift(dom, rho, p.m);
  return dom.lin_comb(1.0, por, 1.0, chemo);
}

// Scalar monotonicity probe for the inequality
//   (|a|^{m-1}a - |b|^{m-1}b)(a - b) >= |a - b|^{m+1}
// as literally stated; it fails for mixed signs (see the charting tests),
// and holds on the nonnegative cone.
inline bool check_monotonicity(double a, double b, double m) {
  if (!(m >= 1.0)) throw std::invalid_argument("check_monotonicity: m must be >= 1");
  const double lhs = (signed_power(a, m) - signed_power(b, m)) * (a - b);
  const double rhs = std::pow(std::abs(a - b), m + 1.0);
  return lhs >= rhs - 1e-12;
}

struct CoercivityProbe {
  double lhs = 0.0;          // 2 <Abar(rho;xi), rho> + ||B(rho)||_HS^2
  double dissipation = 0.0;  // 2 ||rho||_{L^{m+1}}^{m+1}
  double forcing = 0.0;      // ||xi||_{L^{m+1}}^4 + ||rho||_{H^-1}^2
};

inline CoercivityProbe coercivity_probe(const Domain& dom, const Field& rho, const Field& xi, const ModelParams& p) {
  CoercivityProbe out;
  Field rs = dom.to_spectral(rho);
  Field xs = dom.to_spectral(xi);
  const NoiseModes modes = build_noise_modes(p.noise, dom.basis());
  const double hs = hs_norm_B(dom, rs, modes, p.noise.sigma);
  out.lhs = 2.0 * dom.dual_pairing(frozen_drift(dom, rs, xs, p), rs) + hs * hs;
  const double lm1 = dom.norm_lp(rs, p.m + 1.0);
  out.dissipation = 2.0 * std::pow(lm1, p.m + 1.0);
  const double xi_lm1 = dom.norm_lp(xs, p.m + 1.0);
  const double h1 = dom.norm_hminus1(rs);
  out.forcing = std::pow(xi_lm1, 4.0) + h1 * h1;
  return out;
}

}  // namespace sks
