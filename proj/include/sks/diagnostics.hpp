// Energy functionals of the existence bounds, the discrete H^-1 Ito-identity
// residual, and blow-up / positivity summaries over stored paths.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sks/fixed_point.hpp"

namespace sks {

struct EnergyReport {
  double sup_h1_sq = 0.0;   // sup_t ||rho||_{H^-1}^2
  double int_lm1 = 0.0;     // int ||rho||_{L^{m+1}}^{m+1} dt (trapezoid over saves)
  double sup_lm1 = 0.0;     // sup_t ||rho||_{L^{m+1}}^{m+1}
  double int_gradm = 0.0;   // int || |rho|^{m-1} grad rho ||_{L^2}^2 dt
  double min_value = 0.0;   // min grid value over the path
  double mass_drift = 0.0;  // max_t |int rho dt - int rho0|
  std::vector<double> mass_trace;
  double r1_composite = 0.0;  // sup_h1_sq + 4 int_lm1
  double r2_composite = 0.0;  // sup_lm1 + m^2 (m+1) int_gradm
  bool truncated = false;     // path blew up; functionals cover [0, t_blow)
};

inline EnergyReport energy_report(const Domain& dom, const PathSample& path, double m) {
  if (path.coeffs.empty()) throw std::invalid_argument("energy_report: empty path");
  EnergyReport rep;
  rep.truncated = path.blown;
  rep.min_value = std::numeric_limits<double>::infinity();
  std::vector<double> lm1_vals, gradm_vals;
  double mass0 = 0.0;
  for (size_t s = 0; s < path.coeffs.size(); ++s) {
    Field f = dom.from_coeffs(path.coeffs[s]);
    const double h1 = dom.norm_hminus1(f);
    rep.sup_h1_sq = std::max(rep.sup_h1_sq, h1 * h1);
    const double lp = dom.norm_lp(f, m + 1.0);
    const double lm1 = std::pow(lp, m + 1.0);
    rep.sup_lm1 = std::max(rep.sup_lm1, lm1);
    lm1_vals.push_back(lm1);
    const double wg = dom.weighted_gradient_l2(f, m);
    gradm_vals.push_back(wg * wg);
    rep.min_value = std::min(rep.min_value, dom.min_grid(f));
    const double mass = dom.integral(f);
    rep.mass_trace.push_back(mass);
    if (s == 0) mass0 = mass;
    rep.mass_drift = std::max(rep.mass_drift, std::abs(mass - mass0));
  }
  for (size_t s = 0; s + 1 < path.save_times.size(); ++s) {
    const double w = 0.5 * (path.save_times[s + 1] - path.save_times[s]);
    rep.int_lm1 += w * (lm1_vals[s] + lm1_vals[s + 1]);
    rep.int_gradm += w * (gradm_vals[s] + gradm_vals[s + 1]);
  }
  rep.r1_composite = rep.sup_h1_sq + 4.0 * rep.int_lm1;
  rep.r2_composite = rep.sup_lm1 + m * m * (m + 1.0) * rep.int_gradm;
  return rep;
}

// Per-substep residual of the discrete H^-1 identity
//   d||rho||^2 = [2 <Abar(rho;xi), rho> + ||B(rho)||_HS^2] dt + 2 <rho, dM>
// accumulated by re-integrating the path from its recorded seed.  The
// ensemble mean of the total picks up only the O(dt) discretization bias
// (taming plus the quadratic drift term); the martingale part cancels.
struct ItoPathResidual {
  std::vector<double> per_step;
  double total = 0.0;
};

inline ItoPathResidual ito_residual(const Domain& dom, const PathSample& path,
                                    const PathSample* xi_path, const ModelParams& params) {
  if (path.coeffs.empty()) throw std::invalid_argument("ito_residual: empty path");
  const NoiseModes modes = build_noise_modes(params.noise, dom.basis());
  ItoPathResidual rep;
  const auto& lam = dom.basis().eigenvalues;
  StepObserver obs = [&](const StepRecord& rec) {
    Field before = rec.before;
    Field after = rec.after;
    double h1_before = 0.0, h1_after = 0.0;
    for (size_t k = 0; k < before.spec.size(); ++k) {
      h1_before += before.spec[k] * before.spec[k] / lam[k];
      h1_after += after.spec[k] * after.spec[k] / lam[k];
    }
    const Field drift = frozen_drift(dom, before, rec.xi, params);
    const double hs = hs_norm_B(dom, before, modes, params.noise.sigma);
    double noise_pair = 0.0;
    if (params.noise.sigma != 0.0) {
      Field dm = apply_noise(dom, before, rec.inc, modes, params.noise.sigma);
      noise_pair = dom.dual_pairing(before, dm);
    }
    const double compensator =
        2.0 * dom.dual_pairing(drift, before) * rec.dt + hs * hs * rec.dt + 2.0 * noise_pair;
    rep.per_step.push_back((h1_after - h1_before) - compensator);
  };
  Field rho0 = dom.from_coeffs(path.coeffs.front());
  PathSample replay = integrate_path(dom, rho0, params, path.config, path.meta.seed, xi_path, obs);
  if (replay.coeffs.size() != path.coeffs.size() || replay.coeffs.back() != path.coeffs.back())
    throw std::runtime_error("ito_residual: replay does not match the recorded path");
  for (double r : rep.per_step) rep.total += r;
  return rep;
}

struct ItoResidualReport {
  std::vector<double> totals;  // summed residual per path
  double mean = 0.0;
  double std_error = 0.0;
};

inline ItoResidualReport ito_residual_ensemble(const Domain& dom, const std::vector<PathSample>& paths,
                                               const ModelParams& params) {
  ItoResidualReport rep;
  rep.totals.resize(paths.size());
  parallel_for(static_cast<int>(paths.size()), [&](int i) {
    rep.totals[i] = ito_residual(dom, paths[i], nullptr, params).total;
  });
  for (double t : rep.totals) rep.mean += t;
  rep.mean /= rep.totals.size();
  if (rep.totals.size() >= 2) {
    double var = 0.0;
    for (double t : rep.totals) var += (t - rep.mean) * (t - rep.mean);
    var /= (rep.totals.size() - 1.0);
    rep.std_error = std::sqrt(var / rep.totals.size());
  }
  return rep;
}

struct BlowupPositivity {
  bool blown = false;
  double t_blow = -1.0;      // < 0 when not blown
  double min_value = 0.0;    // min grid value over saved fields
  double mass_drift = 0.0;   // informational; Dirichlet flow does not conserve mass
};

inline BlowupPositivity blowup_and_positivity(const Domain& dom, const PathSample& path) {
  BlowupPositivity out;
  out.blown = path.blown;
  out.t_blow = path.blown ? path.blowup_time : -1.0;
  out.min_value = std::numeric_limits<double>::infinity();
  double mass0 = 0.0;
  for (size_t s = 0; s < path.coeffs.size(); ++s) {
    Field f = dom.from_coeffs(path.coeffs[s]);
    out.min_value = std::min(out.min_value, dom.min_grid(f));
    const double mass = dom.integral(f);
    if (s == 0) mass0 = mass;
    out.mass_drift = std::max(out.mass_drift, std::abs(mass - mass0));
  }
  if (path.coeffs.empty()) out.min_value = 0.0;
  return out;
}

}  // namespace sks
