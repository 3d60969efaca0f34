// The solution operator T of the frozen-chemotaxis model and the numerical
// counterparts of its fixed-point analysis: ensemble S_T distances with
// common random numbers, Picard iteration, a Holder-continuity probe and a
// time-equicontinuity probe.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sks/integrator.hpp"
#include "sks/threads.hpp"

namespace sks {

struct STNormEstimate {
  int ensemble = 0;        // pairs included
  int excluded = 0;        // blown-up pairs skipped
  double value = 0.0;      // (mean_p sup_t ||a - b||_{H^-1}^2)^{1/2}
  double std_error = 0.0;  // delta-method standard error of `value`
};

namespace detail {

inline void require_aligned(const std::vector<PathSample>& a, const std::vector<PathSample>& b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("st_distance: ensembles must be nonempty and equally sized");
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].blown || b[i].blown) continue;
    if (a[i].save_times.size() != b[i].save_times.size())
      throw std::invalid_argument("st_distance: misaligned save times");
    for (size_t s = 0; s < a[i].save_times.size(); ++s)
      if (std::abs(a[i].save_times[s] - b[i].save_times[s]) > 1e-12)
        throw std::invalid_argument("st_distance: misaligned save times");
  }
}

}  // namespace detail

// Ensemble estimate of ||a - b||_{S_T} = (E sup_t ||a_t - b_t||_{H^-1}^2)^{1/2},
// pairing members by index (common random numbers).
inline STNormEstimate st_distance(const Domain& dom, const std::vector<PathSample>& a,
                                  const std::vector<PathSample>& b) {
  detail::require_aligned(a, b);
  const auto& lam = dom.basis().eigenvalues;
  std::vector<double> sups;
  int excluded = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].blown || b[i].blown) {
      ++excluded;
      continue;
    }
    double sup = 0.0;
    for (size_t s = 0; s < a[i].coeffs.size(); ++s) {
      const auto& ca = a[i].coeffs[s];
      const auto& cb = b[i].coeffs[s];
      double h1 = 0.0;
      for (size_t k = 0; k < ca.size(); ++k) {
        const double d = ca[k] - cb[k];
        h1 += d * d / lam[k];
      }
      sup = std::max(sup, h1);
    }
    sups.push_back(sup);
  }
  STNormEstimate est;
  est.ensemble = static_cast<int>(sups.size());
  est.excluded = excluded;
  if (sups.empty()) throw std::runtime_error("st_distance: all ensemble members blown up");
  double mean = 0.0;
  for (double s : sups) mean += s;
  mean /= sups.size();
  est.value = std::sqrt(mean);
  if (sups.size() >= 2) {
    double var = 0.0;
    for (double s : sups) var += (s - mean) * (s - mean);
    var /= (sups.size() - 1.0);
    const double se_mean = std::sqrt(var / sups.size());
    est.std_error = est.value > 0.0 ? se_mean / (2.0 * est.value) : 0.0;
  }
  return est;
}

// A constant-in-time trajectory of rho0 on the save grid of cfg: the Picard
// seed xi^(0).
inline PathSample constant_trajectory(const Domain& dom, const Field& rho0, const IntegratorConfig& cfg) {
  cfg.validate();
  Field r = dom.to_spectral(rho0);
  PathSample path;
  path.config = cfg;
  const int nsteps = cfg.steps();
  const int save_every = cfg.effective_save_every();
  path.save_times.push_back(0.0);
  path.coeffs.push_back(r.spec);
  for (int n = 0; n < nsteps; ++n)
    if ((n + 1) % save_every == 0 || n + 1 == nsteps) {
      path.save_times.push_back((n + 1) * cfg.dt);
      path.coeffs.push_back(r.spec);
    }
  return path;
}

// T applied memberwise: member i is integrated in frozen mode against
// xi_paths[i] with the stream derived from (master_seed, i).  Streams do not
// depend on xi, so repeated applications reuse the same noise paths.
inline std::vector<PathSample> apply_T(const Domain& dom, const std::vector<PathSample>& xi_paths,
                                       const Field& rho0, const ModelParams& params,
                                       const IntegratorConfig& cfg, std::uint64_t master_seed) {
  std::vector<PathSample> out(xi_paths.size());
  Field r0 = dom.to_spectral(rho0);
  parallel_for(static_cast<int>(xi_paths.size()), [&](int i) {
    const std::uint64_t seed = GaussianStream::derive(master_seed, static_cast<std::uint64_t>(i));
    out[i] = integrate_path(dom, r0, params, cfg, seed, &xi_paths[i]);
  });
  return out;
}

struct PicardReport {
  int iterations = 0;              // J: number of distances recorded
  std::vector<double> distances;   // d_j = ||xi^(j) - xi^(j-1)||_{S_T}, j = 1..J
  double contraction_ratio = 0.0;  // median of d_{j+1}/d_j
  bool converged = false;          // d_J < tol_abs
  bool failed = false;             // every member blew up
  int blown_members = 0;
};

inline PicardReport picard_iterate(const Domain& dom, const Field& rho0, const ModelParams& params,
                                   const IntegratorConfig& cfg, int ensemble, int j_max,
                                   double tol_abs, std::uint64_t master_seed) {
  if (ensemble < 1) throw std::invalid_argument("picard_iterate: ensemble must be >= 1");
  if (j_max < 1) throw std::invalid_argument("picard_iterate: j_max must be >= 1");
  PicardReport report;
  std::vector<PathSample> xi(ensemble, constant_trajectory(dom, rho0, cfg));
  for (int j = 1; j <= j_max; ++j) {
    std::vector<PathSample> next = apply_T(dom, xi, rho0, params, cfg, master_seed);
    int blown = 0;
    for (const auto& p : next) blown += p.blown ? 1 : 0;
    report.blown_members = std::max(report.blown_members, blown);
    if (blown == ensemble) {
      report.failed = true;
      break;
    }
    const STNormEstimate d = st_distance(dom, next, xi);
    report.distances.push_back(d.value);
    xi = std::move(next);
    if (d.value < tol_abs) {
      report.converged = true;
      break;
    }
  }
  report.iterations = static_cast<int>(report.distances.size());
  std::vector<double> ratios;
  for (size_t j = 0; j + 1 < report.distances.size(); ++j)
    if (report.distances[j] > 0.0) ratios.push_back(report.distances[j + 1] / report.distances[j]);
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    const size_t mid = ratios.size() / 2;
    report.contraction_ratio =
        ratios.size() % 2 ? ratios[mid] : 0.5 * (ratios[mid - 1] + ratios[mid]);
  }
  return report;
}

struct HolderReport {
  double delta_hat = 0.0;   // log-log slope of st_distance(T xi1, T xi2) vs st_distance(xi1, xi2)
  double fit_quality = 0.0; // regression R^2
  bool degenerate = false;  // T constant in xi (all output distances ~ 0)
  std::vector<double> xs, ys;
};

inline HolderReport holder_probe(const Domain& dom, const Field& rho0, const ModelParams& params,
                                 const IntegratorConfig& cfg, const std::vector<double>& eps,
                                 int ensemble, std::uint64_t master_seed, const Field* direction = nullptr) {
  if (eps.empty()) throw std::invalid_argument("holder_probe: need at least one perturbation scale");
  Field eta = direction ? dom.to_spectral(*direction) : dom.eigenmode(0);
  const double eta_h1 = dom.norm_hminus1(eta);
  if (eta_h1 == 0.0) throw std::invalid_argument("holder_probe: zero perturbation direction");

  const std::vector<PathSample> xi1(ensemble, constant_trajectory(dom, rho0, cfg));
  const std::vector<PathSample> t_xi1 = apply_T(dom, xi1, rho0, params, cfg, master_seed);

  HolderReport rep;
  Field r0 = dom.to_spectral(rho0);
  for (double e : eps) {
    Field shifted = dom.lin_comb(1.0, r0, e, eta);
    const std::vector<PathSample> xi2(ensemble, constant_trajectory(dom, shifted, cfg));
    const std::vector<PathSample> t_xi2 = apply_T(dom, xi2, rho0, params, cfg, master_seed);
    rep.xs.push_back(st_distance(dom, xi1, xi2).value);
    rep.ys.push_back(st_distance(dom, t_xi1, t_xi2).value);
  }

  double yscale = 0.0;
  for (double y : rep.ys) yscale = std::max(yscale, y);
  double xscale = 0.0;
  for (double x : rep.xs) xscale = std::max(xscale, x);
  if (yscale <= 1e-13 * std::max(1.0, xscale)) {
    rep.degenerate = true;
    return rep;
  }
  if (rep.xs.size() < 2) throw std::invalid_argument("holder_probe: need >= 2 scales for a fit");

  // Least squares on log y = delta * log x + c.
  const size_t n = rep.xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    if (rep.xs[i] <= 0.0 || rep.ys[i] <= 0.0)
      throw std::runtime_error("holder_probe: degenerate distance in fit");
    const double lx = std::log(rep.xs[i]), ly = std::log(rep.ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::runtime_error("holder_probe: degenerate abscissae");
  rep.delta_hat = (n * sxy - sx * sy) / denom;
  const double ss_tot = syy - sy * sy / n;
  const double ss_res = ss_tot - rep.delta_hat * (sxy - sx * sy / n);
  rep.fit_quality = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return rep;
}

struct EquicontinuityReport {
  double c_hat = 0.0;  // max over pairs of E||Txi(t1) - Txi(t2)||^2 / |t1 - t2|
  std::pair<double, double> worst_pair{0.0, 0.0};
};

inline EquicontinuityReport equicontinuity_probe(const Domain& dom, const std::vector<PathSample>& xi_paths,
                                                 const Field& rho0, const ModelParams& params,
                                                 const IntegratorConfig& cfg, std::uint64_t master_seed) {
  const std::vector<PathSample> t_xi = apply_T(dom, xi_paths, rho0, params, cfg, master_seed);
  const PathSample* ref = nullptr;
  for (const auto& p : t_xi)
    if (!p.blown && (!ref || p.save_times.size() > ref->save_times.size())) ref = &p;
  if (!ref || ref->save_times.size() < 2)
    throw std::invalid_argument("equicontinuity_probe: need at least 2 save times");
  const size_t nsave = ref->save_times.size();

  const auto& lam = dom.basis().eigenvalues;
  EquicontinuityReport rep;
  for (size_t s1 = 0; s1 + 1 < nsave; ++s1)
    for (size_t s2 = s1 + 1; s2 < nsave; ++s2) {
      double mean = 0.0;
      int count = 0;
      for (const auto& p : t_xi) {
        if (p.blown || p.coeffs.size() <= s2) continue;
        const auto& c1 = p.coeffs[s1];
        const auto& c2 = p.coeffs[s2];
        double h1 = 0.0;
        for (size_t k = 0; k < c1.size(); ++k) {
          const double d = c1[k] - c2[k];
          h1 += d * d / lam[k];
        }
        mean += h1;
        ++count;
      }
      if (count == 0) continue;
      mean /= count;
      const double gap = ref->save_times[s2] - ref->save_times[s1];
      if (gap <= 0.0) continue;
      const double ratio = mean / gap;
      if (ratio > rep.c_hat) {
        rep.c_hat = ratio;
        rep.worst_pair = {ref->save_times[s1], ref->save_times[s2]};
      }
    }
  return rep;
}

}  // namespace sks
